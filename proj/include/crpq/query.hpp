#pragma once

#include <string>
#include <vector>

#include "crpq/graph.hpp"
#include "crpq/nfa.hpp"
#include "crpq/regex.hpp"

namespace crpq {

using Var = std::string;

struct Atom {
    Var src;
    Var dst;
    Regex lang;
    Nfa nfa;

    static Atom make(Var src, Var dst, Regex lang);
};

// Q(x1,...,xn) = A1 ∧ ... ∧ Am.  Free variables may repeat; variables not
// covered by any atom are allowed (they arise from ε-collapses) and range
// freely during evaluation.
struct Crpq {
    std::vector<Var> vars;       // sorted, unique; atom vars ∪ free vars
    std::vector<Var> free_vars;  // ordered tuple, repetitions allowed
    std::vector<Atom> atoms;
    std::vector<Symbol> alphabet;  // sorted, unique

    std::size_t arity() const { return free_vars.size(); }
    bool is_boolean() const { return free_vars.empty(); }
    bool has_var(const Var& v) const;
};

Crpq make_crpq(std::vector<Var> free_vars, std::vector<Atom> atoms);

struct CrpqUnion {
    std::vector<Crpq> disjuncts;  // nonempty; same free arity
};

enum class QueryClass { Cq, CrpqFin, Crpq };

// Most specific class: CQ iff every language is exactly one one-letter word,
// CRPQfin iff every regex is star-free.
QueryClass classify(const Crpq& q);
std::string query_class_name(QueryClass c);

// The canonical database: one node per variable, one edge per atom.
// Requires a CQ (call sites that need richer graphs expand first).
GraphDb canonical_db(const Crpq& q);

// Text format: "Q(x,y) := x -[REGEX]-> y, y -[c*]-> x".
Crpq parse_query(const std::string& text);
std::string print_query(const Crpq& q);

// Rewrites Q into an equivalent union of ε-free CRPQs.  Each atom whose
// language contains ε splits into the language-minus-ε branch and the
// endpoint-collapsed branch, applied recursively.  Throws resource_error
// when more than `disjunct_cap` disjuncts would be produced.
CrpqUnion eliminate_epsilon(const Crpq& q, std::size_t disjunct_cap = 0 /* 0 = default */);

// Replaces chains x -[L]-> y -[L']-> x' (y non-free, in/out degree one,
// y ∉ {x,x'}) by x -[L L']-> x'.  Idempotent; preserves standard and
// query-injective evaluation.
Crpq merge_chain_atoms(const Crpq& q);

std::size_t default_disjunct_cap();

} // namespace crpq
