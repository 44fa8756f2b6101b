#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crpq/graph.hpp"

namespace crpq {

// Regular expression AST.  Grammar accepted by parse_regex:
//   R ::= eps | SYMBOL | 'multi char symbol' | (R) | R R | R + R | R* | R^+
// with precedence star/plus > concatenation > union.  `+` is union; Kleene
// plus is written `^+`.  Empty is internal only (produced by ε-removal),
// never parsed and never printed as part of a query.
enum class RegexKind { Empty, Epsilon, Symbol, Concat, Union, Star, Plus };

struct RegexNode;
using Regex = std::shared_ptr<const RegexNode>;

struct RegexNode {
    RegexKind kind;
    Symbol symbol;      // Symbol only
    Regex left, right;  // Concat/Union: both; Star/Plus: left
};

Regex re_empty();
Regex re_eps();
Regex re_sym(const Symbol& a);
Regex re_cat(Regex a, Regex b);
Regex re_alt(Regex a, Regex b);
Regex re_star(Regex a);
Regex re_plus(Regex a);

Regex re_word(const Word& w);                     // concatenation of symbols (ε for empty)
Regex re_alt_all(const std::vector<Regex>& rs);   // n-ary union; Empty for empty list
Regex re_cat_all(const std::vector<Regex>& rs);   // n-ary concat; ε for empty list

Regex parse_regex(const std::string& text);
std::string print_regex(const Regex& r);

bool regex_nullable(const Regex& r);              // ε in the language
bool regex_is_empty_language(const Regex& r);
bool regex_star_free(const Regex& r);
std::set<Symbol> regex_alphabet(const Regex& r);

// Longest word length; nullopt when the language is infinite.
// Empty language reports 0.
std::optional<std::size_t> regex_max_len(const Regex& r);

// Reference word-membership evaluator, independent of the NFA path.
bool regex_matches(const Regex& r, const Word& w);

// Language minus {ε}; may return Empty.
Regex regex_without_epsilon(const Regex& r);

} // namespace crpq
