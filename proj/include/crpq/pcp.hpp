#pragma once

#include <string>
#include <vector>

#include "crpq/expansion.hpp"
#include "crpq/query.hpp"

namespace crpq {

// ---------------------------------------------------------------------------
// From a Post Correspondence Problem instance to the Boolean CRPQ pair whose
// atom-injective containment encodes solvability.  Hatted symbols are written
// with a '^' prefix; the other marker symbols use the ASCII spellings
//   □ -> sq    # -> #     #∞ -> #inf    $ -> $     $' -> $p    $∞ -> $inf
//   ■ -> bsq   ■' -> bsqp
// ---------------------------------------------------------------------------

struct PcpInstance {
    // nonempty words over lowercase letters
    std::vector<std::pair<std::string, std::string>> pairs;
};

// one pair per line: "u v"
PcpInstance parse_pcp(const std::string& text);

// u_{i1}···u_{ik} == v_{i1}···v_{ik}?  Indices are 1-based.
bool check_solution(const PcpInstance& inst, const std::vector<int>& s);

struct ReductionOutput {
    PcpInstance instance;
    Crpq q1;  // twelve atoms: four mains, four box gadgets, four end markers
    Crpq q2;  // x -[K]-> x ∧ y -[L]-> x ∧ y -[M]-> z
    std::vector<std::pair<std::string, Regex>> forbidden;  // the eight K_*/M_*
    std::vector<std::pair<std::string, Regex>> dummies;    // K_dummy, M_dummy
    Regex lang_L;
    std::vector<Symbol> alphabet;
    std::size_t max_u_len = 0;  // N = longest U_i
};

ReductionOutput reduce(const PcpInstance& inst);

// The four structural conditions (same index sequences plus the prescribed
// identifications and non-identifications).
bool is_well_formed(const AinjExpansion& f, const ReductionOutput& out);

// No simple cycle labeled in any forbidden K-language and no simple path
// labeled in any forbidden M-language inside db(f).
bool forbidden_scan(const AinjExpansion& f, const ReductionOutput& out);

// The canonical well-formed a-inj-expansion realizing a solution.
AinjExpansion solution_to_expansion(const ReductionOutput& out,
                                    const std::vector<int>& s);

} // namespace crpq
