#include <doctest.h>

#include "crpq/errors.hpp"
#include "crpq/evaluation.hpp"
#include "crpq/query.hpp"

using namespace crpq;

namespace {

Crpq q_of(const std::string& text) { return parse_query(text); }

} // namespace

TEST_CASE("query parsing and round trip") {
    Crpq q = q_of("Q(x,y) := x -[(ab)*]-> y, y -[c*]-> x");
    CHECK(q.arity() == 2);
    CHECK(q.atoms.size() == 2);
    CHECK(q.vars == std::vector<Var>{"x", "y"});
    Crpq q2 = parse_query(print_query(q));
    CHECK(print_query(q2) == print_query(q));

    Crpq boolean = q_of("Q() := x -[a]-> y");
    CHECK(boolean.is_boolean());

    Crpq empty = q_of("Q() :=");
    CHECK(empty.atoms.empty());

    // free variable outside any atom (arises from ε-collapses)
    Crpq freeonly = q_of("Q(y,y) :=");
    CHECK(freeonly.vars == std::vector<Var>{"y"});

    CHECK_THROWS_AS(q_of("Q(x := x -[a]-> y"), parse_error);
    CHECK_THROWS_AS(q_of("Q(x) := x -[]-> y"), parse_error);
}

TEST_CASE("classify") {
    CHECK(classify(q_of("Q() := x -[a]-> y, y -[b]-> z")) == QueryClass::Cq);
    CHECK(classify(q_of("Q() := x -[ab+ba]-> y")) == QueryClass::CrpqFin);
    CHECK(classify(q_of("Q() := x -[(ab)*]-> y")) == QueryClass::Crpq);
    // single-letter language written redundantly still counts as CQ
    CHECK(classify(q_of("Q() := x -[a+a]-> y")) == QueryClass::Cq);
    // ε-containing single letter is not a CQ
    CHECK(classify(q_of("Q() := x -[a+eps]-> y")) == QueryClass::CrpqFin);
}

TEST_CASE("eliminate_epsilon shapes") {
    // no ε anywhere: singleton union
    auto u1 = eliminate_epsilon(q_of("Q(x,y) := x -[ab]-> y"));
    CHECK(u1.disjuncts.size() == 1);

    // x -[a*]-> y: the a-plus branch and the collapsed branch
    auto u2 = eliminate_epsilon(q_of("Q() := x -[a*]-> y"));
    REQUIRE(u2.disjuncts.size() == 2);
    bool has_plus = false, has_empty = false;
    for (const Crpq& d : u2.disjuncts) {
        if (d.atoms.empty()) has_empty = true;
        if (d.atoms.size() == 1 && !regex_nullable(d.atoms[0].lang)) has_plus = true;
    }
    CHECK(has_plus);
    CHECK(has_empty);

    // both atoms ε-containing: four disjuncts
    auto u3 = eliminate_epsilon(q_of("Q(x,y) := x -[(ab)*]-> y, y -[c*]-> x"));
    CHECK(u3.disjuncts.size() == 4);
    for (const Crpq& d : u3.disjuncts)
        for (const Atom& a : d.atoms) CHECK_FALSE(regex_nullable(a.lang));

    // disjunct cap
    CHECK_THROWS_AS(
        eliminate_epsilon(q_of("Q() := a -[x*]-> b, b -[x*]-> c, c -[x*]-> d"), 3),
        resource_error);
}

TEST_CASE("eliminate_epsilon preserves evaluation on small graphs") {
    GraphDb g = parse_graph("u a m\nm b u\nu c u\n");
    Crpq q = q_of("Q(x,y) := x -[(ab)*]-> y, y -[c*]-> x");
    auto u = eliminate_epsilon(q);
    for (Semantics sem : {Semantics::St, Semantics::AInj, Semantics::QInj}) {
        auto direct = evaluate(q, g, sem);
        std::set<std::vector<Node>> unioned;
        for (const Crpq& d : u.disjuncts) {
            auto part = evaluate(d, g, sem);
            unioned.insert(part.begin(), part.end());
        }
        CHECK(direct == unioned);
    }
}

TEST_CASE("merge_chain_atoms") {
    Crpq q = q_of("Q() := x -[a]-> y, y -[b]-> z");
    Crpq m = merge_chain_atoms(q);
    REQUIRE(m.atoms.size() == 1);
    CHECK(m.atoms[0].src == "x");
    CHECK(m.atoms[0].dst == "z");
    CHECK(m.atoms[0].nfa.accepts(Word{"a", "b"}));

    // coinciding neighbors produce a self-loop (the rule only needs y ∉ {x,x'});
    // the lexicographically first chain variable (x) is eliminated first
    Crpq cyc = q_of("Q() := x -[a]-> y, y -[b]-> x");
    Crpq mcyc = merge_chain_atoms(cyc);
    REQUIRE(mcyc.atoms.size() == 1);
    CHECK(mcyc.atoms[0].src == "y");
    CHECK(mcyc.atoms[0].dst == "y");
    CHECK(mcyc.atoms[0].nfa.accepts(Word{"b", "a"}));

    // free variables are never merged away
    Crpq fr = q_of("Q(y) := x -[a]-> y, y -[b]-> z");
    CHECK(merge_chain_atoms(fr).atoms.size() == 2);

    // idempotent
    Crpq chain = q_of("Q() := a -[x]-> b, b -[y]-> c, c -[z]-> d");
    Crpq once = merge_chain_atoms(chain);
    CHECK(print_query(merge_chain_atoms(once)) == print_query(once));
    CHECK(once.atoms.size() == 1);
}

TEST_CASE("merge_chain_atoms preserves st and qinj evaluation") {
    GraphDb g = parse_graph("u a v\nv b w\nw a u\nu b u\n");
    Crpq q = q_of("Q(x) := x -[a]-> y, y -[b]-> z, z -[a+b]-> w");
    Crpq m = merge_chain_atoms(q);
    CHECK(m.atoms.size() < q.atoms.size());
    for (Semantics sem : {Semantics::St, Semantics::QInj})
        CHECK(evaluate(q, g, sem) == evaluate(m, g, sem));
}

TEST_CASE("canonical db") {
    Crpq q = q_of("Q() := x -[a]-> y, x -[b]-> y");
    GraphDb db = canonical_db(q);
    CHECK(db.nodes() == std::vector<Node>{"x", "y"});
    CHECK(db.edges().size() == 2);
    CHECK_THROWS_AS(canonical_db(q_of("Q() := x -[a*]-> y")), domain_error);
}
