#include "crpq/morphism.hpp"

#include <algorithm>
#include <set>

#include "crpq/errors.hpp"

namespace crpq {

namespace {

struct SearchCtx {
    const Crpq& q;
    const GraphDb& g;
    const HomMode& mode;
    std::vector<Var> order;                    // assignment order
    std::map<Var, std::vector<std::size_t>> incident;  // var -> atom indices
    std::map<Var, std::set<Var>> must_differ;  // symmetric distinctness constraints
    std::vector<Symbol> atom_label;            // single letter per atom
    Mapping assignment;

    bool consistent(const Var& v) {
        const Node& node = assignment.at(v);
        for (std::size_t ai : incident.at(v)) {
            const Atom& a = q.atoms[ai];
            auto s = assignment.find(a.src);
            auto t = assignment.find(a.dst);
            if (s != assignment.end() && t != assignment.end() &&
                !g.has_edge(s->second, atom_label[ai], t->second))
                return false;
        }
        if (mode.kind == HomModeKind::Injective) {
            for (const auto& [u, n] : assignment)
                if (u != v && n == node) return false;
        } else if (!must_differ.empty()) {
            auto it = must_differ.find(v);
            if (it != must_differ.end())
                for (const Var& u : it->second) {
                    auto a = assignment.find(u);
                    if (a != assignment.end() && a->second == node) return false;
                }
        }
        return true;
    }

    bool search(std::size_t depth) {
        if (depth == order.size()) return true;
        const Var& v = order[depth];
        if (assignment.count(v)) return search(depth + 1);
        for (const Node& node : g.nodes()) {
            assignment[v] = node;
            if (consistent(v) && search(depth + 1)) return true;
            assignment.erase(v);
        }
        return false;
    }
};

} // namespace

std::optional<Mapping> find_hom(const Crpq& source, const GraphDb& target,
                                const std::optional<std::vector<Node>>& anchor,
                                const HomMode& mode) {
    if (classify(source) != QueryClass::Cq && !source.atoms.empty())
        throw domain_error("find_hom: source must be a CQ");
    if (anchor && anchor->size() != source.arity())
        throw domain_error("find_hom: anchor arity mismatch");

    SearchCtx ctx{source, target, mode, {}, {}, {}, {}, {}};
    for (const Var& v : source.vars) ctx.incident[v] = {};
    for (std::size_t i = 0; i < source.atoms.size(); ++i) {
        const Atom& a = source.atoms[i];
        std::vector<Word> ws = nfa_words_upto(a.nfa, 1);
        if (ws.size() != 1 || ws[0].size() != 1)
            throw domain_error("find_hom: source must be a CQ");
        ctx.atom_label.push_back(ws[0][0]);
        ctx.incident[a.src].push_back(i);
        ctx.incident[a.dst].push_back(i);
    }

    if (mode.kind == HomModeKind::AtomInjective) {
        for (const auto& [a, b] : mode.distinct_pairs) {
            if (a == b) continue;
            ctx.must_differ[a].insert(b);
            ctx.must_differ[b].insert(a);
        }
    } else if (mode.kind == HomModeKind::NonContracting) {
        for (const Atom& a : source.atoms)
            if (a.src != a.dst) {
                ctx.must_differ[a.src].insert(a.dst);
                ctx.must_differ[a.dst].insert(a.src);
            }
    }

    if (anchor) {
        for (std::size_t i = 0; i < anchor->size(); ++i) {
            const Var& v = source.free_vars[i];
            if (!target.has_node((*anchor)[i])) return std::nullopt;
            auto it = ctx.assignment.find(v);
            if (it != ctx.assignment.end()) {
                if (it->second != (*anchor)[i]) return std::nullopt;
            } else {
                ctx.assignment[v] = (*anchor)[i];
                if (!ctx.consistent(v)) return std::nullopt;
            }
        }
    }

    ctx.order = source.vars;
    std::stable_sort(ctx.order.begin(), ctx.order.end(), [&](const Var& a, const Var& b) {
        return ctx.incident.at(a).size() > ctx.incident.at(b).size();
    });

    if (ctx.search(0)) return ctx.assignment;
    return std::nullopt;
}

bool is_non_contracting(const Mapping& m, const Crpq& source) {
    for (const Atom& a : source.atoms)
        if (a.src != a.dst && m.at(a.src) == m.at(a.dst)) return false;
    return true;
}

} // namespace crpq
