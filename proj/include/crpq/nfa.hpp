#pragma once

#include <set>
#include <string>
#include <vector>

#include "crpq/graph.hpp"
#include "crpq/regex.hpp"

namespace crpq {

// NFA without ε-transitions.  The language may still contain ε
// (some initial state is also final).
struct Nfa {
    int n = 0;
    std::vector<char> initial;  // size n
    std::vector<char> final;    // size n
    // trans[q] = sorted list of (symbol, target)
    std::vector<std::vector<std::pair<Symbol, int>>> trans;

    std::set<int> initial_states() const;
    std::set<int> final_states() const;
    std::set<int> step(const std::set<int>& from, const Symbol& a) const;
    bool accepts(const Word& w) const;
    bool accepts_epsilon() const;
    std::set<Symbol> symbols() const;
};

// Glushkov position construction: ε-transition-free, language-equivalent.
Nfa compile_nfa(const Regex& r);

// Same language; every (state, symbol) over `alphabet` gains at least one
// outgoing and one incoming transition.  Adds a non-accepting sink when some
// outgoing transition is missing and a non-initial source when some incoming
// one is; added states satisfy both closure properties themselves.
Nfa complete_cocomplete(const Nfa& a, const std::vector<Symbol>& alphabet);

bool nfa_language_nonempty(const Nfa& a);

// Accepted words of length <= max_len in length-lexicographic order.
std::vector<Word> nfa_words_upto(const Nfa& a, std::size_t max_len);

// States co-reachable from a final state.
std::vector<char> nfa_coreachable(const Nfa& a);

// Left/right quotient u \ L / v as an NFA over the same state space.
Nfa nfa_quotient(const Nfa& a, const Word& u, const Word& v);

// NFA for alphabet* . L . alphabet* (factor closure).
Nfa nfa_factor_closure(const Nfa& a, const std::vector<Symbol>& alphabet);

// L(a) ⊆ L(b), by product with the determinized complement of b.
bool nfa_language_subset(const Nfa& a, const Nfa& b, std::size_t subset_cap = 1u << 20);

} // namespace crpq
