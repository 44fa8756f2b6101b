#include "crpq/query.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "crpq/errors.hpp"

namespace crpq {

Atom Atom::make(Var src, Var dst, Regex lang) {
    Atom a;
    a.src = std::move(src);
    a.dst = std::move(dst);
    a.nfa = compile_nfa(lang);
    a.lang = std::move(lang);
    return a;
}

bool Crpq::has_var(const Var& v) const {
    return std::binary_search(vars.begin(), vars.end(), v);
}

Crpq make_crpq(std::vector<Var> free_vars, std::vector<Atom> atoms) {
    Crpq q;
    std::set<Var> vs(free_vars.begin(), free_vars.end());
    std::set<Symbol> as;
    for (const Atom& a : atoms) {
        vs.insert(a.src);
        vs.insert(a.dst);
        auto syms = regex_alphabet(a.lang);
        as.insert(syms.begin(), syms.end());
    }
    q.vars.assign(vs.begin(), vs.end());
    q.free_vars = std::move(free_vars);
    q.atoms = std::move(atoms);
    q.alphabet.assign(as.begin(), as.end());
    return q;
}

QueryClass classify(const Crpq& q) {
    bool cq = true;
    for (const Atom& a : q.atoms) {
        if (!regex_star_free(a.lang)) return QueryClass::Crpq;
        if (!cq) continue;
        auto ml = regex_max_len(a.lang);
        if (!ml || *ml != 1 || regex_nullable(a.lang)) {
            cq = false;
            continue;
        }
        std::vector<Word> words = nfa_words_upto(a.nfa, *ml);
        cq = words.size() == 1 && words[0].size() == 1;
    }
    return cq ? QueryClass::Cq : QueryClass::CrpqFin;
}

std::string query_class_name(QueryClass c) {
    switch (c) {
        case QueryClass::Cq: return "CQ";
        case QueryClass::CrpqFin: return "CRPQfin";
        case QueryClass::Crpq: return "CRPQ";
    }
    return "?";
}

GraphDb canonical_db(const Crpq& q) {
    if (classify(q) != QueryClass::Cq)
        throw domain_error("canonical_db requires a CQ");
    std::vector<Edge> edges;
    for (const Atom& a : q.atoms) {
        std::vector<Word> ws = nfa_words_upto(a.nfa, 1);
        edges.push_back(Edge{a.src, ws.at(0).at(0), a.dst});
    }
    return GraphDb(q.vars, edges);
}

// ---------------------------------------------------------------------------
// Text format

namespace {

bool is_var_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
           c == '\'';
}

struct QueryParser {
    const std::string& s;
    std::size_t i = 0;

    explicit QueryParser(const std::string& text) : s(text) {}

    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }

    bool eat(const std::string& tok) {
        skip_ws();
        if (s.compare(i, tok.size(), tok) == 0) {
            i += tok.size();
            return true;
        }
        return false;
    }

    void expect(const std::string& tok) {
        if (!eat(tok)) throw parse_error("expected '" + tok + "'", i);
    }

    Var parse_var() {
        skip_ws();
        std::size_t start = i;
        while (i < s.size() && is_var_char(s[i])) ++i;
        if (i == start) throw parse_error("expected a variable name", i);
        return s.substr(start, i - start);
    }
};

} // namespace

Crpq parse_query(const std::string& text) {
    QueryParser p(text);
    p.parse_var();  // query name, ignored
    p.expect("(");
    std::vector<Var> free_vars;
    p.skip_ws();
    if (!p.eat(")")) {
        for (;;) {
            free_vars.push_back(p.parse_var());
            if (p.eat(")")) break;
            p.expect(",");
        }
    }
    p.expect(":=");
    std::vector<Atom> atoms;
    p.skip_ws();
    if (p.i < p.s.size()) {
        for (;;) {
            Var src = p.parse_var();
            p.expect("-[");
            std::size_t re_start = p.i;
            int depth = 0;
            bool quoted = false;
            while (p.i < p.s.size()) {
                char c = p.s[p.i];
                if (quoted) {
                    if (c == '\'') quoted = false;
                } else if (c == '\'') {
                    quoted = true;
                } else if (c == '(') {
                    ++depth;
                } else if (c == ')') {
                    --depth;
                } else if (c == ']' && depth == 0 && p.s.compare(p.i, 3, "]->") == 0) {
                    break;
                }
                ++p.i;
            }
            if (p.i >= p.s.size()) throw parse_error("expected ']->'", p.i);
            std::string re_text = p.s.substr(re_start, p.i - re_start);
            p.i += 3;
            Var dst = p.parse_var();
            Regex re;
            try {
                re = parse_regex(re_text);
            } catch (const parse_error& e) {
                throw parse_error(std::string("in atom regex: ") + e.what(),
                                  re_start + e.pos);
            }
            atoms.push_back(Atom::make(src, dst, re));
            p.skip_ws();
            if (p.i >= p.s.size()) break;
            p.expect(",");
        }
    }
    return make_crpq(std::move(free_vars), std::move(atoms));
}

std::string print_query(const Crpq& q) {
    std::ostringstream out;
    out << "Q(";
    for (std::size_t i = 0; i < q.free_vars.size(); ++i) {
        if (i) out << ",";
        out << q.free_vars[i];
    }
    out << ") :=";
    for (std::size_t i = 0; i < q.atoms.size(); ++i) {
        out << (i ? ", " : " ");
        out << q.atoms[i].src << " -[" << print_regex(q.atoms[i].lang) << "]-> "
            << q.atoms[i].dst;
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Normalizations

std::size_t default_disjunct_cap() {
    if (const char* env = std::getenv("CRPQ_DISJUNCT_CAP")) {
        long v = std::atol(env);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return 64;
}

namespace {

Crpq substitute_var(const Crpq& q, const Var& from, const Var& to,
                    std::size_t drop_atom) {
    std::vector<Var> free_vars = q.free_vars;
    for (Var& v : free_vars)
        if (v == from) v = to;
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < q.atoms.size(); ++i) {
        if (i == drop_atom) continue;
        Atom a = q.atoms[i];
        if (a.src == from) a.src = to;
        if (a.dst == from) a.dst = to;
        atoms.push_back(std::move(a));
    }
    return make_crpq(std::move(free_vars), std::move(atoms));
}

void eliminate_rec(const Crpq& q, std::vector<Crpq>& out, std::size_t cap) {
    for (std::size_t i = 0; i < q.atoms.size(); ++i) {
        const Atom& a = q.atoms[i];
        if (!regex_nullable(a.lang)) continue;
        // branch 1: keep the atom with ε removed (dropped if that empties it)
        Regex rest = regex_without_epsilon(a.lang);
        if (!regex_is_empty_language(rest)) {
            Crpq keep = q;
            keep.atoms[i] = Atom::make(a.src, a.dst, rest);
            eliminate_rec(keep, out, cap);
        }
        // branch 2: collapse src := dst and drop the atom
        eliminate_rec(substitute_var(q, a.src, a.dst, i), out, cap);
        return;
    }
    if (out.size() >= cap)
        throw resource_error("eliminate_epsilon: disjunct cap (" + std::to_string(cap) +
                             ") exceeded");
    out.push_back(q);
}

} // namespace

CrpqUnion eliminate_epsilon(const Crpq& q, std::size_t disjunct_cap) {
    if (disjunct_cap == 0) disjunct_cap = default_disjunct_cap();
    CrpqUnion u;
    eliminate_rec(q, u.disjuncts, disjunct_cap);
    return u;
}

Crpq merge_chain_atoms(const Crpq& q) {
    Crpq cur = q;
    for (;;) {
        std::set<Var> free_set(cur.free_vars.begin(), cur.free_vars.end());
        std::map<Var, std::vector<std::size_t>> in, out;
        for (std::size_t i = 0; i < cur.atoms.size(); ++i) {
            out[cur.atoms[i].src].push_back(i);
            in[cur.atoms[i].dst].push_back(i);
        }
        bool merged = false;
        for (const Var& y : cur.vars) {
            if (free_set.count(y)) continue;
            if (in[y].size() != 1 || out[y].size() != 1) continue;
            const Atom& ain = cur.atoms[in[y][0]];
            const Atom& aout = cur.atoms[out[y][0]];
            // the rule needs y ∉ {x, x'}; x = x' is fine and yields a self-loop
            if (ain.src == y || aout.dst == y) continue;
            Atom joined = Atom::make(ain.src, aout.dst, re_cat(ain.lang, aout.lang));
            std::vector<Atom> atoms;
            for (std::size_t i = 0; i < cur.atoms.size(); ++i)
                if (i != in[y][0] && i != out[y][0]) atoms.push_back(cur.atoms[i]);
            atoms.push_back(std::move(joined));
            cur = make_crpq(cur.free_vars, std::move(atoms));
            merged = true;
            break;
        }
        if (!merged) return cur;
    }
}

} // namespace crpq
