#include <doctest.h>

#include <random>

#include "crpq/errors.hpp"
#include "crpq/expansion.hpp"
#include "crpq/morphism.hpp"

using namespace crpq;

namespace {

// Exhaustive oracle over all |nodes|^|vars| mappings.
bool exhaustive_hom_exists(const Crpq& src, const GraphDb& g,
                           const std::optional<std::vector<Node>>& anchor,
                           const HomMode& mode) {
    std::vector<Var> vars = src.vars;
    const auto& nodes = g.nodes();
    std::vector<std::size_t> pick(vars.size(), 0);
    if (nodes.empty()) return vars.empty();
    for (;;) {
        Mapping m;
        for (std::size_t i = 0; i < vars.size(); ++i) m[vars[i]] = nodes[pick[i]];
        bool ok = true;
        if (anchor)
            for (std::size_t i = 0; i < anchor->size() && ok; ++i)
                ok = m.at(src.free_vars[i]) == (*anchor)[i];
        for (std::size_t i = 0; i < src.atoms.size() && ok; ++i) {
            const Atom& a = src.atoms[i];
            Word w = nfa_words_upto(a.nfa, 1).at(0);
            ok = g.has_edge(m.at(a.src), w[0], m.at(a.dst));
        }
        if (ok) {
            switch (mode.kind) {
                case HomModeKind::Plain: break;
                case HomModeKind::Injective: {
                    std::set<Node> img;
                    for (const auto& [v, n] : m) img.insert(n);
                    ok = img.size() == m.size();
                    break;
                }
                case HomModeKind::AtomInjective:
                    for (const auto& [x, y] : mode.distinct_pairs)
                        if (m.at(x) == m.at(y)) ok = false;
                    break;
                case HomModeKind::NonContracting:
                    ok = is_non_contracting(m, src);
                    break;
            }
        }
        if (ok) return true;
        std::size_t i = 0;
        while (i < vars.size() && ++pick[i] == nodes.size()) pick[i++] = 0;
        if (i == vars.size()) return false;
    }
}

Crpq random_cq(std::mt19937_64& rng, int max_atoms, int max_vars,
               const std::vector<Symbol>& sigma) {
    int atoms = 1 + static_cast<int>(rng() % max_atoms);
    int vars = 2 + static_cast<int>(rng() % (max_vars - 1));
    std::vector<Atom> as;
    for (int i = 0; i < atoms; ++i) {
        Var x = "v" + std::to_string(rng() % vars);
        Var y = "v" + std::to_string(rng() % vars);
        as.push_back(Atom::make(x, y, re_sym(sigma[rng() % sigma.size()])));
    }
    std::vector<Var> free_vars;
    if (rng() % 2) free_vars.push_back(as[0].src);
    return make_crpq(free_vars, as);
}

GraphDb random_graph(std::mt19937_64& rng, int max_nodes,
                     const std::vector<Symbol>& sigma) {
    int n = 1 + static_cast<int>(rng() % max_nodes);
    std::vector<Edge> edges;
    int m = static_cast<int>(rng() % (2 * n + 2));
    for (int i = 0; i < m; ++i)
        edges.push_back({"n" + std::to_string(rng() % n), sigma[rng() % sigma.size()],
                         "n" + std::to_string(rng() % n)});
    std::vector<Node> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back("n" + std::to_string(i));
    return GraphDb(nodes, edges);
}

} // namespace

TEST_CASE("find_hom basics") {
    Crpq src = parse_query("Q() := x -[a]-> y");
    GraphDb g = parse_graph("u a v\n");
    auto m = find_hom(src, g, std::nullopt, HomMode::plain());
    REQUIRE(m.has_value());
    CHECK(m->at("x") == "u");
    CHECK(m->at("y") == "v");

    CHECK_THROWS_AS(find_hom(parse_query("Q() := x -[ab]-> y"), g, std::nullopt,
                             HomMode::plain()),
                    domain_error);
}

TEST_CASE("§-style example: injective vs atom-injective into a 2-node target") {
    // source: two disconnected atoms; target: canonical db of x -a-> y ∧ x -b-> y
    Crpq src = parse_query("Q() := x -[a]-> y, x2 -[b]-> y2");
    GraphDb target = parse_graph("x a y\nx b y\n");

    CHECK_FALSE(find_hom(src, target, std::nullopt, HomMode::injective()).has_value());

    // per-atom distinctness only
    auto mode = HomMode::atom_injective({{"x", "y"}, {"x2", "y2"}});
    auto m = find_hom(src, target, std::nullopt, mode);
    REQUIRE(m.has_value());
    CHECK(m->at("x") != m->at("y"));
    CHECK(m->at("x2") != m->at("y2"));
}

TEST_CASE("non-contracting homomorphisms") {
    Crpq loopfree = parse_query("Q() := x -[a]-> y, y -[b]-> z");
    Mapping identity{{"x", "x"}, {"y", "y"}, {"z", "z"}};
    CHECK(is_non_contracting(identity, loopfree));

    Crpq one = parse_query("Q() := x -[a]-> y");
    Mapping collapse{{"x", "u"}, {"y", "u"}};
    CHECK_FALSE(is_non_contracting(collapse, one));

    // composition of two non-contracting mappings is non-contracting
    Mapping f{{"x", "p"}, {"y", "q"}, {"z", "r"}};
    Mapping g{{"p", "1"}, {"q", "2"}, {"r", "3"}};
    Mapping composed;
    for (const auto& [v, n] : f) composed[v] = g.at(n);
    CHECK(is_non_contracting(f, loopfree));
    CHECK(is_non_contracting(composed, loopfree));
}

TEST_CASE("anchored search pins the free tuple") {
    Crpq src = parse_query("Q(x,y) := x -[a]-> y");
    GraphDb g = parse_graph("u a v\nv a w\n");
    auto m = find_hom(src, g, std::vector<Node>{"v", "w"}, HomMode::plain());
    REQUIRE(m.has_value());
    CHECK(m->at("x") == "v");
    CHECK(m->at("y") == "w");
    CHECK_FALSE(find_hom(src, g, std::vector<Node>{"v", "u"}, HomMode::plain()));
}

TEST_CASE("find_hom agrees with exhaustive enumeration; mode hierarchy") {
    std::mt19937_64 rng(424242);
    std::vector<Symbol> sigma{"a", "b"};
    int hierarchy_checked = 0;
    for (int i = 0; i < 220; ++i) {
        Crpq src = random_cq(rng, 4, 5, sigma);
        GraphDb g = random_graph(rng, 6, sigma);
        std::optional<std::vector<Node>> anchor;
        if (!src.free_vars.empty() && !g.nodes().empty() && rng() % 2)
            anchor = std::vector<Node>{g.nodes()[rng() % g.nodes().size()]};

        // AtomInjective pairs: per-atom endpoint distinctness
        std::vector<std::pair<Var, Var>> pairs;
        for (const Atom& a : src.atoms)
            if (a.src != a.dst) pairs.push_back({a.src, a.dst});

        std::vector<HomMode> modes{HomMode::plain(), HomMode::injective(),
                                   HomMode::atom_injective(pairs),
                                   HomMode::non_contracting()};
        std::vector<bool> got;
        for (const HomMode& mode : modes) {
            bool fast = find_hom(src, g, anchor, mode).has_value();
            bool slow = exhaustive_hom_exists(src, g, anchor, mode);
            REQUIRE(fast == slow);
            got.push_back(fast);
        }
        // Injective ⇒ AtomInjective ⇒ Plain
        if (got[1]) CHECK(got[2]);
        if (got[2]) CHECK(got[0]);
        ++hierarchy_checked;
    }
    CHECK(hierarchy_checked == 220);
}

TEST_CASE("witness mappings satisfy their mode") {
    std::mt19937_64 rng(5);
    std::vector<Symbol> sigma{"a", "b"};
    for (int i = 0; i < 50; ++i) {
        Crpq src = random_cq(rng, 3, 4, sigma);
        GraphDb g = random_graph(rng, 5, sigma);
        auto m = find_hom(src, g, std::nullopt, HomMode::non_contracting());
        if (m) CHECK(is_non_contracting(*m, src));
    }
}
