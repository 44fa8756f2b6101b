#include "crpq/regex.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <sstream>
#include <tuple>

#include "crpq/errors.hpp"

namespace crpq {

static Regex make(RegexKind k, Symbol s = {}, Regex l = nullptr, Regex r = nullptr) {
    auto n = std::make_shared<RegexNode>();
    n->kind = k;
    n->symbol = std::move(s);
    n->left = std::move(l);
    n->right = std::move(r);
    return n;
}

Regex re_empty() { return make(RegexKind::Empty); }
Regex re_eps() { return make(RegexKind::Epsilon); }
Regex re_sym(const Symbol& a) { return make(RegexKind::Symbol, a); }

Regex re_cat(Regex a, Regex b) {
    if (a->kind == RegexKind::Empty || b->kind == RegexKind::Empty) return re_empty();
    if (a->kind == RegexKind::Epsilon) return b;
    if (b->kind == RegexKind::Epsilon) return a;
    return make(RegexKind::Concat, {}, std::move(a), std::move(b));
}

Regex re_alt(Regex a, Regex b) {
    if (a->kind == RegexKind::Empty) return b;
    if (b->kind == RegexKind::Empty) return a;
    return make(RegexKind::Union, {}, std::move(a), std::move(b));
}

Regex re_star(Regex a) {
    if (a->kind == RegexKind::Empty || a->kind == RegexKind::Epsilon) return re_eps();
    return make(RegexKind::Star, {}, std::move(a));
}

Regex re_plus(Regex a) {
    if (a->kind == RegexKind::Empty) return re_empty();
    if (a->kind == RegexKind::Epsilon) return re_eps();
    return make(RegexKind::Plus, {}, std::move(a));
}

Regex re_word(const Word& w) {
    Regex r = re_eps();
    for (const Symbol& a : w) r = re_cat(r, re_sym(a));
    return r;
}

Regex re_alt_all(const std::vector<Regex>& rs) {
    Regex r = re_empty();
    for (const Regex& x : rs) r = re_alt(r, x);
    return r;
}

Regex re_cat_all(const std::vector<Regex>& rs) {
    Regex r = re_eps();
    for (const Regex& x : rs) r = re_cat(r, x);
    return r;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct RegexParser {
    const std::string& s;
    std::size_t i = 0;

    explicit RegexParser(const std::string& text) : s(text) {}

    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }

    bool at_end() {
        skip_ws();
        return i >= s.size();
    }

    char peek() {
        skip_ws();
        return i < s.size() ? s[i] : '\0';
    }

    bool starts_primary() {
        char c = peek();
        if (c == '\0' || c == ')' || c == '+' || c == '*' || c == '^') return false;
        return true;
    }

    Regex parse_union() {
        Regex r = parse_concat();
        while (peek() == '+') {
            ++i;
            r = re_alt(r, parse_concat());
        }
        return r;
    }

    Regex parse_concat() {
        Regex r = parse_repeat();
        while (starts_primary()) r = re_cat(r, parse_repeat());
        return r;
    }

    Regex parse_repeat() {
        Regex r = parse_primary();
        for (;;) {
            char c = peek();
            if (c == '*') {
                ++i;
                r = re_star(r);
            } else if (c == '^') {
                ++i;
                if (i >= s.size() || s[i] != '+')
                    throw parse_error("expected '+' after '^'", i);
                ++i;
                r = re_plus(r);
            } else {
                break;
            }
        }
        return r;
    }

    Regex parse_primary() {
        skip_ws();
        if (i >= s.size()) throw parse_error("unexpected end of regex", i);
        char c = s[i];
        if (c == '(') {
            ++i;
            Regex r = parse_union();
            skip_ws();
            if (i >= s.size() || s[i] != ')') throw parse_error("expected ')'", i);
            ++i;
            return r;
        }
        if (c == '\'') {
            std::size_t start = ++i;
            while (i < s.size() && s[i] != '\'') ++i;
            if (i >= s.size()) throw parse_error("unterminated quoted symbol", start);
            if (i == start) throw parse_error("empty quoted symbol", start);
            Symbol sym = s.substr(start, i - start);
            ++i;
            return re_sym(sym);
        }
        if (s.compare(i, 3, "eps") == 0) {
            i += 3;
            return re_eps();
        }
        if (c == ')' || c == '+' || c == '*' || c == '^')
            throw parse_error(std::string("unexpected '") + c + "' in regex", i);
        ++i;
        return re_sym(std::string(1, c));
    }
};

} // namespace

Regex parse_regex(const std::string& text) {
    RegexParser p(text);
    if (p.at_end()) throw parse_error("empty regex (write 'eps' for the empty word)", 0);
    Regex r = p.parse_union();
    if (!p.at_end()) throw parse_error("trailing input after regex", p.i);
    return r;
}

// ---------------------------------------------------------------------------
// Printing (precedence-aware)

namespace {

bool symbol_needs_quotes(const Symbol& a) {
    return a.size() != 1 || !std::isalnum(static_cast<unsigned char>(a[0]));
}

// levels: 0 = union, 1 = concat, 2 = repeat/atom
void print_rec(const Regex& r, int level, std::ostream& out) {
    switch (r->kind) {
        case RegexKind::Empty:
            // Not expressible in the grammar; only for diagnostics.
            out << "<empty>";
            return;
        case RegexKind::Epsilon:
            out << "eps";
            return;
        case RegexKind::Symbol:
            if (symbol_needs_quotes(r->symbol))
                out << '\'' << r->symbol << '\'';
            else
                out << r->symbol;
            return;
        case RegexKind::Union:
            if (level > 0) out << '(';
            print_rec(r->left, 0, out);
            out << " + ";
            print_rec(r->right, 0, out);
            if (level > 0) out << ')';
            return;
        case RegexKind::Concat:
            if (level > 1) out << '(';
            print_rec(r->left, 1, out);
            out << ' ';
            print_rec(r->right, 1, out);
            if (level > 1) out << ')';
            return;
        case RegexKind::Star:
            print_rec(r->left, 2, out);
            out << '*';
            return;
        case RegexKind::Plus:
            print_rec(r->left, 2, out);
            out << "^+";
            return;
    }
}

} // namespace

std::string print_regex(const Regex& r) {
    std::ostringstream out;
    print_rec(r, 0, out);
    return out.str();
}

// ---------------------------------------------------------------------------
// Structural predicates

bool regex_nullable(const Regex& r) {
    switch (r->kind) {
        case RegexKind::Empty: return false;
        case RegexKind::Epsilon: return true;
        case RegexKind::Symbol: return false;
        case RegexKind::Concat: return regex_nullable(r->left) && regex_nullable(r->right);
        case RegexKind::Union: return regex_nullable(r->left) || regex_nullable(r->right);
        case RegexKind::Star: return true;
        case RegexKind::Plus: return regex_nullable(r->left);
    }
    return false;
}

bool regex_is_empty_language(const Regex& r) {
    switch (r->kind) {
        case RegexKind::Empty: return true;
        case RegexKind::Epsilon: return false;
        case RegexKind::Symbol: return false;
        case RegexKind::Concat:
            return regex_is_empty_language(r->left) || regex_is_empty_language(r->right);
        case RegexKind::Union:
            return regex_is_empty_language(r->left) && regex_is_empty_language(r->right);
        case RegexKind::Star: return false;
        case RegexKind::Plus: return regex_is_empty_language(r->left);
    }
    return true;
}

bool regex_star_free(const Regex& r) {
    switch (r->kind) {
        case RegexKind::Empty:
        case RegexKind::Epsilon:
        case RegexKind::Symbol: return true;
        case RegexKind::Concat:
        case RegexKind::Union: return regex_star_free(r->left) && regex_star_free(r->right);
        case RegexKind::Star:
        case RegexKind::Plus: return false;
    }
    return true;
}

std::set<Symbol> regex_alphabet(const Regex& r) {
    std::set<Symbol> out;
    std::function<void(const Regex&)> walk = [&](const Regex& x) {
        if (!x) return;
        if (x->kind == RegexKind::Symbol) out.insert(x->symbol);
        walk(x->left);
        walk(x->right);
    };
    walk(r);
    return out;
}

std::optional<std::size_t> regex_max_len(const Regex& r) {
    switch (r->kind) {
        case RegexKind::Empty: return 0;
        case RegexKind::Epsilon: return 0;
        case RegexKind::Symbol: return 1;
        case RegexKind::Concat: {
            auto a = regex_max_len(r->left), b = regex_max_len(r->right);
            if (regex_is_empty_language(r)) return 0;
            if (!a || !b) return std::nullopt;
            return *a + *b;
        }
        case RegexKind::Union: {
            auto a = regex_max_len(r->left), b = regex_max_len(r->right);
            if (!a || !b) return std::nullopt;
            return std::max(*a, *b);
        }
        case RegexKind::Star:
        case RegexKind::Plus: {
            auto a = regex_max_len(r->left);
            if (a && *a == 0) return 0;
            return std::nullopt;
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Reference matcher (memoized recursive descent over word slices)

namespace {

struct MatchMemo {
    // (node pointer, i, j) -> verdict
    std::map<std::tuple<const RegexNode*, std::size_t, std::size_t>, bool> table;
};

bool match_rec(const Regex& r, const Word& w, std::size_t i, std::size_t j, MatchMemo& memo) {
    auto key = std::make_tuple(r.get(), i, j);
    auto it = memo.table.find(key);
    if (it != memo.table.end()) return it->second;
    bool result = false;
    switch (r->kind) {
        case RegexKind::Empty: result = false; break;
        case RegexKind::Epsilon: result = i == j; break;
        case RegexKind::Symbol: result = (j == i + 1 && w[i] == r->symbol); break;
        case RegexKind::Union:
            result = match_rec(r->left, w, i, j, memo) || match_rec(r->right, w, i, j, memo);
            break;
        case RegexKind::Concat:
            for (std::size_t k = i; k <= j && !result; ++k)
                result = match_rec(r->left, w, i, k, memo) && match_rec(r->right, w, k, j, memo);
            break;
        case RegexKind::Star:
            if (i == j) {
                result = true;
            } else {
                // first nonempty block, then the rest
                for (std::size_t k = i + 1; k <= j && !result; ++k)
                    result = match_rec(r->left, w, i, k, memo) && match_rec(r, w, k, j, memo);
            }
            break;
        case RegexKind::Plus:
            // First block, then recursively the rest; ε-blocks are dropped
            // except when the whole slice is empty.
            for (std::size_t k = i; k <= j && !result; ++k) {
                if (!match_rec(r->left, w, i, k, memo)) continue;
                if (k == j)
                    result = true;
                else if (k > i)
                    result = match_rec(r, w, k, j, memo);
            }
            break;
    }
    memo.table[key] = result;
    return result;
}

} // namespace

bool regex_matches(const Regex& r, const Word& w) {
    MatchMemo memo;
    return match_rec(r, w, 0, w.size(), memo);
}

Regex regex_without_epsilon(const Regex& r) {
    switch (r->kind) {
        case RegexKind::Empty: return re_empty();
        case RegexKind::Epsilon: return re_empty();
        case RegexKind::Symbol: return r;
        case RegexKind::Union:
            return re_alt(regex_without_epsilon(r->left), regex_without_epsilon(r->right));
        case RegexKind::Concat: {
            // (L1 L2) \ ε = (L1\ε) L2  ∪  [ε ∈ L1] (L2\ε)
            Regex a = re_cat(regex_without_epsilon(r->left), r->right);
            if (regex_nullable(r->left)) a = re_alt(a, regex_without_epsilon(r->right));
            return a;
        }
        case RegexKind::Star:
            return re_plus(regex_without_epsilon(r->left));
        case RegexKind::Plus: {
            Regex core = regex_without_epsilon(r->left);
            if (regex_nullable(r->left)) return re_plus(core);
            return r;
        }
    }
    return re_empty();
}

} // namespace crpq
