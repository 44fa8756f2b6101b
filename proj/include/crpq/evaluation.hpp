#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crpq/graph.hpp"
#include "crpq/morphism.hpp"
#include "crpq/nfa.hpp"
#include "crpq/query.hpp"

namespace crpq {

enum class Semantics { St, AInj, QInj };

Semantics parse_semantics(const std::string& name);
std::string semantics_name(Semantics s);

struct EvalOptions {
    long long step_budget = 0;  // 0 = default (env CRPQ_NODE_BUDGET or builtin)
};

long long default_step_budget();

// Exact result set Q(G)^⋆, sorted lexicographically.
// ε-languages are handled through eliminate_epsilon.
std::set<std::vector<Node>> evaluate(const Crpq& q, const GraphDb& g, Semantics sem,
                                     const EvalOptions& opts = {});

// v̄ ∈ Q(G)^⋆ without materializing the full result set.
bool eval_membership(const Crpq& q, const GraphDb& g, const std::vector<Node>& tuple,
                     Semantics sem, const EvalOptions& opts = {});

// Some (arbitrary) path u -> v with label in L(n)?  Product BFS.
bool st_reach(const GraphDb& g, const Node& u, const Node& v, const Nfa& n);

// A satisfying assignment together with one witness path per atom of the
// matched ε-free disjunct (atom order follows the disjunct).
struct MatchWitness {
    Mapping mu;
    Crpq disjunct;
    std::vector<std::vector<Node>> atom_paths;  // node sequences, ε-atoms collapsed away
};

// Up to `limit` matches witnessing tuple ∈ q(g)^sem.
std::vector<MatchWitness> find_matches(const Crpq& q, const GraphDb& g,
                                       const std::vector<Node>& tuple, Semantics sem,
                                       std::size_t limit, const EvalOptions& opts = {});

// Same, over an already ε-eliminated union (repeated callers avoid
// re-normalizing the query).
std::vector<MatchWitness> find_matches_prepared(const CrpqUnion& u, const GraphDb& g,
                                                const std::vector<Node>& tuple,
                                                Semantics sem, std::size_t limit,
                                                const EvalOptions& opts = {});

} // namespace crpq
