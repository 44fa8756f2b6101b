#include <doctest.h>

#include <random>

#include "crpq/errors.hpp"
#include "crpq/evaluation.hpp"
#include "crpq/expansion.hpp"
#include "crpq/morphism.hpp"

using namespace crpq;

namespace {

using Tuple = std::vector<Node>;
using Result = std::set<Tuple>;

Crpq q_of(const std::string& text) { return parse_query(text); }

GraphDb random_graph(std::mt19937_64& rng, int max_nodes, int max_edges,
                     const std::vector<Symbol>& sigma) {
    int n = 1 + static_cast<int>(rng() % max_nodes);
    std::vector<Node> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back("n" + std::to_string(i));
    std::vector<Edge> edges;
    int m = static_cast<int>(rng() % (max_edges + 1));
    for (int i = 0; i < m; ++i)
        edges.push_back({nodes[rng() % n], sigma[rng() % sigma.size()], nodes[rng() % n]});
    return GraphDb(nodes, edges);
}

Regex random_regex(std::mt19937_64& rng, int depth, const std::vector<Symbol>& sigma,
                   bool allow_star = true) {
    int top = depth <= 0 ? 1 : (allow_star ? 5 : 3);
    switch (rng() % (top + 1)) {
        case 0:
        case 1: return re_sym(sigma[rng() % sigma.size()]);
        case 2: return re_cat(random_regex(rng, depth - 1, sigma, allow_star),
                              random_regex(rng, depth - 1, sigma, allow_star));
        case 3: return re_alt(random_regex(rng, depth - 1, sigma, allow_star),
                              random_regex(rng, depth - 1, sigma, allow_star));
        case 4: return re_star(random_regex(rng, depth - 1, sigma, allow_star));
        default: return re_plus(random_regex(rng, depth - 1, sigma, allow_star));
    }
}

Crpq random_crpq(std::mt19937_64& rng, int max_atoms, int max_vars, int arity,
                 const std::vector<Symbol>& sigma, bool allow_star = true) {
    int atoms = 1 + static_cast<int>(rng() % max_atoms);
    int vars = 2 + static_cast<int>(rng() % std::max(1, max_vars - 1));
    std::vector<Atom> as;
    for (int i = 0; i < atoms; ++i)
        as.push_back(Atom::make("v" + std::to_string(rng() % vars),
                                "v" + std::to_string(rng() % vars),
                                random_regex(rng, 3, sigma, allow_star)));
    std::vector<Var> free_vars;
    for (int i = 0; i < arity; ++i)
        free_vars.push_back(as[rng() % as.size()].src);
    return make_crpq(free_vars, as);
}

} // namespace

TEST_CASE("single edge, all semantics") {
    GraphDb g = parse_graph("u a v\n");
    Crpq q = q_of("Q(x,y) := x -[a]-> y");
    Result expect{{"u", "v"}};
    CHECK(evaluate(q, g, Semantics::St) == expect);
    CHECK(evaluate(q, g, Semantics::AInj) == expect);
    CHECK(evaluate(q, g, Semantics::QInj) == expect);
}

TEST_CASE("membership: anchored miss and Boolean case") {
    GraphDb g = parse_graph("u a v\n");
    Crpq q = q_of("Q(x,y) := x -[a]-> y");
    CHECK(eval_membership(q, g, {"u", "v"}, Semantics::St));
    CHECK_FALSE(eval_membership(q, g, {"v", "u"}, Semantics::St));
    CHECK_THROWS_AS(eval_membership(q, g, {"u"}, Semantics::St), domain_error);

    Crpq b = q_of("Q() := x -[a]-> y");
    CHECK(eval_membership(b, g, {}, Semantics::QInj) ==
          !evaluate(b, g, Semantics::QInj).empty());
}

TEST_CASE("example pair: canonical-database evaluation separates ainj and qinj") {
    // Q2' = x -a-> y ∧ x2 -b-> y2 over db(Q1') where Q1' = x -a-> y ∧ x -b-> y
    Crpq q1p = q_of("Q() := x -[a]-> y, x -[b]-> y");
    Crpq q2p = q_of("Q() := x -[a]-> y, x2 -[b]-> y2");
    GraphDb db = canonical_db(q1p);
    CHECK(evaluate(q2p, db, Semantics::QInj).empty());
    CHECK_FALSE(evaluate(q2p, db, Semantics::AInj).empty());
}

TEST_CASE("qinj witness: path ab through db of the chain query") {
    Crpq q2 = q_of("Q(x,y) := x -[ab]-> y");
    GraphDb path = parse_graph("p0 a p1\np1 b p2\n");
    CHECK(eval_membership(q2, path, {"p0", "p2"}, Semantics::QInj));
}

TEST_CASE("st_reach") {
    GraphDb g = parse_graph("u a u\n");
    CHECK(st_reach(g, "u", "u", compile_nfa(parse_regex("(aa)*"))));
    CHECK(st_reach(g, "u", "u", compile_nfa(parse_regex("c*"))));  // ε path
    GraphDb h = parse_graph("u a v\n");
    CHECK_FALSE(st_reach(h, "v", "u", compile_nfa(parse_regex("a"))));
}

TEST_CASE("strictness witnesses for the running query") {
    Crpq q = q_of("Q(x,y) := x -[(ab)*]-> y, y -[c*]-> x");

    // AInj holds but QInj fails: the c-path must reuse the internal node m
    GraphDb g = parse_graph("u a m\nm b w\nw c m\nm c u\n");
    CHECK(eval_membership(q, g, {"u", "w"}, Semantics::AInj));
    CHECK_FALSE(eval_membership(q, g, {"u", "w"}, Semantics::QInj));
    CHECK(eval_membership(q, g, {"u", "w"}, Semantics::St));

    // St holds but AInj fails: the only abab-path revisits u
    GraphDb g2 = parse_graph("u a m\nm b w\nw a u\nu b v\nv c u\n");
    CHECK(eval_membership(q, g2, {"u", "v"}, Semantics::St));
    CHECK_FALSE(eval_membership(q, g2, {"u", "v"}, Semantics::AInj));
    CHECK_FALSE(eval_membership(q, g2, {"u", "v"}, Semantics::QInj));

    // the spec's small graph: brute-force equality of all three result sets
    GraphDb g3 = parse_graph("u a m\nm b u\nu c u\n");
    Result st = evaluate(q, g3, Semantics::St);
    CHECK(evaluate(q, g3, Semantics::AInj) == st);
    CHECK(evaluate(q, g3, Semantics::QInj) == st);
    CHECK(st.count({"u", "u"}) == 1);
}

TEST_CASE("hierarchy: QInj ⊆ AInj ⊆ St on random instances") {
    std::mt19937_64 rng(987);
    std::vector<Symbol> sigma{"a", "b", "c"};
    for (int i = 0; i < 60; ++i) {
        Crpq q = random_crpq(rng, 3, 4, static_cast<int>(rng() % 3), sigma);
        GraphDb g = random_graph(rng, 5, 8, sigma);
        Result st = evaluate(q, g, Semantics::St);
        Result ai = evaluate(q, g, Semantics::AInj);
        Result qi = evaluate(q, g, Semantics::QInj);
        for (const auto& t : qi) REQUIRE(ai.count(t));
        for (const auto& t : ai) REQUIRE(st.count(t));
    }
}

TEST_CASE("evaluation agrees with the expansion characterizations") {
    std::mt19937_64 rng(31337);
    std::vector<Symbol> sigma{"a", "b"};
    for (int i = 0; i < 40; ++i) {
        Crpq q = random_crpq(rng, 2, 3, static_cast<int>(rng() % 2), sigma);
        GraphDb g = random_graph(rng, 4, 6, sigma);
        std::size_t nodes = g.nodes().size();

        // bound for injective semantics: simple paths/cycles have ≤ |V| edges
        auto expansions = enumerate_expansions(q, nodes);

        // QInj: ∃E ∈ Exp(Q) with an injective anchored hom
        Result qi = evaluate(q, g, Semantics::QInj);
        Result qi_char;
        for (const Expansion& e : expansions) {
            // enumerate anchors = all tuples over nodes
            std::vector<Tuple> anchors{{}};
            for (std::size_t k = 0; k < q.arity(); ++k) {
                std::vector<Tuple> next;
                for (const Tuple& t : anchors)
                    for (const Node& n : g.nodes()) {
                        Tuple t2 = t;
                        t2.push_back(n);
                        next.push_back(t2);
                    }
                anchors = next;
            }
            for (const Tuple& t : anchors)
                if (!qi_char.count(t) &&
                    find_hom(e.cq, g, t, HomMode::injective()).has_value())
                    qi_char.insert(t);
        }
        REQUIRE(qi == qi_char);

        // AInj: ∃F ∈ Exp_ainj(Q) with an injective anchored hom (Corollary 4.5)
        Result ai = evaluate(q, g, Semantics::AInj);
        Result ai_char;
        AinjExpansionStream stream(q, nodes);
        while (auto f = stream.next()) {
            std::vector<Tuple> anchors{{}};
            for (std::size_t k = 0; k < q.arity(); ++k) {
                std::vector<Tuple> next;
                for (const Tuple& t : anchors)
                    for (const Node& n : g.nodes()) {
                        Tuple t2 = t;
                        t2.push_back(n);
                        next.push_back(t2);
                    }
                anchors = next;
            }
            for (const Tuple& t : anchors)
                if (!ai_char.count(t) &&
                    find_hom(f->cq, g, t, HomMode::injective()).has_value())
                    ai_char.insert(t);
        }
        REQUIRE(ai == ai_char);
    }
}

TEST_CASE("evaluation is deterministic") {
    std::mt19937_64 rng(5150);
    std::vector<Symbol> sigma{"a", "b"};
    Crpq q = random_crpq(rng, 3, 4, 2, sigma);
    GraphDb g = random_graph(rng, 5, 8, sigma);
    CHECK(evaluate(q, g, Semantics::AInj) == evaluate(q, g, Semantics::AInj));
}
