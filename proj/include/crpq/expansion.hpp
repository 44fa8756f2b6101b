#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crpq/query.hpp"

namespace crpq {

// One chosen word per atom; the empty word stands for ε.
struct ExpansionProfile {
    std::vector<Word> words;
};

// A CQ obtained from a CRPQ by inflating each atom into a path for its chosen
// word and collapsing the equalities forced by ε-choices.  Internal variables
// are named "<atomIndex>.<position>" before quotienting; a quotient class is
// named after its lexicographically smallest member.
struct Expansion {
    Crpq cq;  // single-letter atoms; free tuple = Φ(source free tuple)
    ExpansionProfile profile;
    std::map<Var, Var> phi;  // pre-quotient variable -> cq variable
    // Symmetric, irreflexive; pairs stored with first < second.
    std::set<std::pair<Var, Var>> atom_related;

    std::string signature() const;  // canonical text identity
};

Expansion build_expansion(const Crpq& q, const ExpansionProfile& profile);

// All expansions whose words have length <= max_len, deduplicated, streamed
// in nondecreasing total word length (ties resolved lexicographically).
class ExpansionStream {
public:
    ExpansionStream(const Crpq& q, std::size_t max_len);
    std::optional<Expansion> next();

private:
    const Crpq& q_;
    // words_by_len_[atom][len] = words of exactly that length
    std::vector<std::vector<std::vector<Word>>> words_by_len_;
    std::size_t max_len_;
    std::size_t total_ = 0;
    std::size_t max_total_ = 0;
    std::vector<std::vector<const Word*>> pending_;  // profiles for current total
    std::size_t pending_pos_ = 0;
    std::set<std::string> seen_;
    bool exhausted_ = false;

    void fill_pending();
};

std::vector<Expansion> enumerate_expansions(const Crpq& q, std::size_t max_len);

// An expansion further quotiented by an identification partition that never
// merges two atom-related variables.
struct AinjExpansion {
    Expansion base;
    std::vector<int> block_of;  // partition over base.cq.vars, RGS-normalized
    Crpq cq;
    std::map<Var, Var> phi;  // base.cq variable -> quotient variable
    std::set<std::pair<Var, Var>> atom_related;  // induced

    bool is_trivial() const;
    std::string signature() const;
};

bool partition_admissible(const Expansion& base, const std::vector<int>& block_of);
AinjExpansion quotient_expansion(const Expansion& base, std::vector<int> block_of);
AinjExpansion trivial_ainj(const Expansion& base);

class AinjExpansionStream {
public:
    AinjExpansionStream(const Crpq& q, std::size_t max_len);
    std::optional<AinjExpansion> next();

private:
    ExpansionStream bases_;
    std::optional<Expansion> cur_;
    std::vector<std::vector<int>> partitions_;  // admissible RGS for cur_
    std::size_t pos_ = 0;

    void advance_base();
};

std::vector<AinjExpansion> enumerate_ainj_expansions(const Crpq& q, std::size_t max_len);

} // namespace crpq
