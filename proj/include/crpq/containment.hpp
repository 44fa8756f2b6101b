#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crpq/evaluation.hpp"
#include "crpq/expansion.hpp"
#include "crpq/nfa.hpp"
#include "crpq/query.hpp"

namespace crpq {

enum class Verdict { Contained, NotContained, Unknown };

// NotContained witnesses are ⋆-expansions of q1 whose free tuple fails
// membership in q2 over the witness taken as a graph database.
struct ContainmentVerdict {
    Verdict kind = Verdict::Unknown;
    std::string decider;                    // which decider produced the verdict
    std::optional<AinjExpansion> witness;   // trivial partition for st/q-inj
    std::size_t bound = 0;                  // max word length explored (Unknown)

    static ContainmentVerdict contained(std::string decider);
    static ContainmentVerdict not_contained(std::string decider, AinjExpansion w);
    static ContainmentVerdict unknown(std::string decider, std::size_t bound);
};

struct ContainOptions {
    std::size_t max_len = 0;           // 0 = default 2·(NFA states of q1)+|vars(q1)|
    long long partition_budget = 0;    // 0 = env CRPQ_PARTITION_BUDGET or builtin
    long long step_budget = 0;         // evaluation budget
};

std::size_t default_max_len(const Crpq& q1);

// Searches for a counterexample among the ⋆-expansions of q1 with word
// lengths <= max_len.  For a-inj semantics the identification partitions of
// each base expansion are searched by complete coarsening descent.  Exhausting
// a star-free q1 (max_len at least its longest word) proves containment.
ContainmentVerdict find_counterexample_bounded(const Crpq& q1, const Crpq& q2,
                                               Semantics sem, std::size_t max_len,
                                               const ContainOptions& opts = {});

// CQ/CQ containment under atom-injective semantics: a non-contracting
// homomorphism q2 -> q1 mapping free variables accordingly.
bool contains_cq_cq_ainj(const Crpq& q1, const Crpq& q2);

// CRPQ/CQ containment via the truncated-expansion scheme (st and a-inj).
// Query-injective inputs are delegated to the abstraction decider, which
// handles joint injectivity across components of q2.
bool contains_crpq_cq(const Crpq& q1, const Crpq& q2, Semantics sem,
                      const ContainOptions& opts = {});

// CRPQ/CRPQfin containment under standard semantics; same truncation scheme
// with N = the largest atom count of a q2 expansion.
bool contains_crpq_crpqfin_st(const Crpq& q1, const Crpq& q2,
                              const ContainOptions& opts = {});

// True iff the product automaton accepts no word.
bool intersection_emptiness(const std::vector<Nfa>& nfas);

enum class DeciderChoice { Auto, Bounded, Exact };

// Dispatcher over the class/semantics table.  Routes to the most specific
// exact decider; falls back to bounded counterexample search.  Exact requests
// on the undecidable a-inj cells raise domain_error with a diagnostic.
ContainmentVerdict contains(const Crpq& q1, const Crpq& q2, Semantics sem,
                            const ContainOptions& opts = {},
                            DeciderChoice choice = DeciderChoice::Auto);

std::string render_witness(const AinjExpansion& w);

} // namespace crpq
