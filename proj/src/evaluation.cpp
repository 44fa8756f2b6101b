#include "crpq/evaluation.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <functional>
#include <map>

#include "crpq/errors.hpp"

namespace crpq {

Semantics parse_semantics(const std::string& name) {
    if (name == "st") return Semantics::St;
    if (name == "ainj") return Semantics::AInj;
    if (name == "qinj") return Semantics::QInj;
    throw domain_error("unknown semantics '" + name + "' (expected st|ainj|qinj)");
}

std::string semantics_name(Semantics s) {
    switch (s) {
        case Semantics::St: return "st";
        case Semantics::AInj: return "ainj";
        case Semantics::QInj: return "qinj";
    }
    return "?";
}

long long default_step_budget() {
    if (const char* env = std::getenv("CRPQ_NODE_BUDGET")) {
        long long v = std::atoll(env);
        if (v > 0) return v;
    }
    return 50'000'000;
}

namespace {

struct Budget {
    long long remaining;
    void tick() {
        if (--remaining < 0)
            throw resource_error("evaluation step budget exceeded");
    }
};

// Graph with integer node ids and per-atom integer-labeled NFA views.
struct Indexed {
    std::vector<Node> nodes;
    std::map<Node, int> node_id;
    std::map<Symbol, int> label_id;
    // out[v] = (label, to); in[v] = (label, from)
    std::vector<std::vector<std::pair<int, int>>> out, in;

    explicit Indexed(const GraphDb& g) {
        nodes = g.nodes();
        for (std::size_t i = 0; i < nodes.size(); ++i)
            node_id[nodes[i]] = static_cast<int>(i);
        out.resize(nodes.size());
        in.resize(nodes.size());
        for (const Edge& e : g.edges()) {
            auto it = label_id.find(e.label);
            int l;
            if (it == label_id.end()) {
                l = static_cast<int>(label_id.size());
                label_id[e.label] = l;
            } else {
                l = it->second;
            }
            out[node_id[e.src]].push_back({l, node_id[e.dst]});
            in[node_id[e.dst]].push_back({l, node_id[e.src]});
        }
    }

    int id(const Node& v) const {
        auto it = node_id.find(v);
        return it == node_id.end() ? -1 : it->second;
    }
};

// Atom NFA with labels mapped into the graph's label space (-1 = unmatched).
struct AtomMachine {
    int n;
    std::vector<char> initial, final;
    std::vector<std::vector<std::pair<int, int>>> delta;  // state -> (label, to)
    bool accepts_eps;

    AtomMachine(const Nfa& a, const Indexed& ix) : n(a.n) {
        initial = a.initial;
        final = a.final;
        accepts_eps = a.accepts_epsilon();
        delta.resize(n);
        for (int q = 0; q < n; ++q)
            for (const auto& [sym, t] : a.trans[q]) {
                auto it = ix.label_id.find(sym);
                if (it != ix.label_id.end()) delta[q].push_back({it->second, t});
            }
    }

    std::vector<char> start_states() const {
        std::vector<char> s(initial.begin(), initial.end());
        return s;
    }
    bool any_final(const std::vector<char>& s) const {
        for (int q = 0; q < n; ++q)
            if (s[q] && final[q]) return true;
        return false;
    }
    std::vector<char> step(const std::vector<char>& s, int label) const {
        std::vector<char> t(n, 0);
        for (int q = 0; q < n; ++q)
            if (s[q])
                for (const auto& [l, to] : delta[q])
                    if (l == label) t[to] = 1;
        return t;
    }
};

bool machine_reach(const Indexed& ix, const AtomMachine& m, int u, int v, Budget& budget) {
    if (u == v && m.accepts_eps) return true;
    // BFS over (node, state)
    std::vector<char> seen(ix.nodes.size() * m.n, 0);
    std::deque<std::pair<int, int>> queue;
    for (int q = 0; q < m.n; ++q)
        if (m.initial[q]) {
            seen[u * m.n + q] = 1;
            queue.push_back({u, q});
        }
    while (!queue.empty()) {
        auto [node, q] = queue.front();
        queue.pop_front();
        budget.tick();
        for (const auto& [l, w] : ix.out[node])
            for (const auto& [ml, t] : m.delta[q]) {
                if (ml != l) continue;
                if (w == v && m.final[t]) return true;
                if (!seen[w * m.n + t]) {
                    seen[w * m.n + t] = 1;
                    queue.push_back({w, t});
                }
            }
    }
    return false;
}

// Shortest witness path for machine_reach (assumes reachable).
std::vector<int> machine_reach_path(const Indexed& ix, const AtomMachine& m, int u, int v,
                                    Budget& budget) {
    if (u == v && m.accepts_eps) return {u};
    std::map<std::pair<int, int>, std::pair<int, int>> parent;
    std::deque<std::pair<int, int>> queue;
    for (int q = 0; q < m.n; ++q)
        if (m.initial[q]) {
            parent[{u, q}] = {-1, -1};
            queue.push_back({u, q});
        }
    while (!queue.empty()) {
        auto cur = queue.front();
        queue.pop_front();
        budget.tick();
        for (const auto& [l, w] : ix.out[cur.first])
            for (const auto& [ml, t] : m.delta[cur.second]) {
                if (ml != l) continue;
                std::pair<int, int> nxt{w, t};
                if (parent.count(nxt)) continue;
                parent[nxt] = cur;
                if (w == v && m.final[t]) {
                    std::vector<int> path;
                    std::pair<int, int> p = nxt;
                    while (p.first != -1) {
                        path.push_back(p.first);
                        p = parent[p];
                    }
                    std::reverse(path.begin(), path.end());
                    return path;
                }
                queue.push_back(nxt);
            }
    }
    return {};
}

// Simple path (or simple cycle when u == v) from u to v with label accepted
// by m; internal nodes must avoid `blocked`.  Returns the node sequence.
std::optional<std::vector<int>> simple_path_search(const Indexed& ix, const AtomMachine& m,
                                                   int u, int v,
                                                   const std::vector<char>& blocked,
                                                   Budget& budget) {
    std::vector<char> visited(ix.nodes.size(), 0);
    std::vector<int> path{u};
    std::optional<std::vector<int>> result;

    std::function<bool(int, std::vector<char>&)> dfs = [&](int node,
                                                           std::vector<char>& states) {
        budget.tick();
        for (const auto& [l, w] : ix.out[node]) {
            std::vector<char> next = m.step(states, l);
            bool any = false;
            for (char c : next)
                if (c) {
                    any = true;
                    break;
                }
            if (!any) continue;
            if (w == v) {
                // a simple path may touch its endpoint only as the last node
                if (m.any_final(next)) {
                    path.push_back(w);
                    result = path;
                    path.pop_back();
                    return true;
                }
                continue;
            }
            if (visited[w] || blocked[w]) continue;
            visited[w] = 1;
            path.push_back(w);
            bool done = dfs(w, next);
            path.pop_back();
            visited[w] = 0;
            if (done) return true;
        }
        return false;
    };

    std::vector<char> start = m.start_states();
    visited[u] = 1;
    dfs(u, start);
    return result;
}

struct DisjunctEval {
    const Crpq& q;
    const Indexed& ix;
    Semantics sem;
    Budget& budget;
    std::vector<AtomMachine> machines;
    std::vector<Var> order;       // assignment order (existential vars)
    std::map<Var, int> mu;        // var -> node id
    std::map<Var, std::vector<std::size_t>> incident;

    DisjunctEval(const Crpq& q_, const Indexed& ix_, Semantics sem_, Budget& b)
        : q(q_), ix(ix_), sem(sem_), budget(b) {
        for (const Atom& a : q.atoms) machines.emplace_back(a.nfa, ix);
        for (const Var& v : q.vars) incident[v] = {};
        for (std::size_t i = 0; i < q.atoms.size(); ++i) {
            incident[q.atoms[i].src].push_back(i);
            incident[q.atoms[i].dst].push_back(i);
        }
    }

    bool atom_feasible(std::size_t i) {
        const Atom& a = q.atoms[i];
        auto s = mu.find(a.src);
        auto t = mu.find(a.dst);
        if (s == mu.end() || t == mu.end()) return true;
        int u = s->second, v = t->second;
        switch (sem) {
            case Semantics::St:
                return machine_reach(ix, machines[i], u, v, budget);
            case Semantics::AInj: {
                if (a.src != a.dst && u == v) return false;  // nonempty simple path
                std::vector<char> blocked(ix.nodes.size(), 0);
                return simple_path_search(ix, machines[i], u, v, blocked, budget)
                    .has_value();
            }
            case Semantics::QInj:
                // necessary condition; the joint path phase decides
                return machine_reach(ix, machines[i], u, v, budget);
        }
        return false;
    }

    bool consistent(const Var& v) {
        if (sem == Semantics::QInj) {
            for (const auto& [u, n] : mu)
                if (u != v && n == mu.at(v)) return false;
        }
        for (std::size_t i : incident.at(v))
            if (!atom_feasible(i)) return false;
        return true;
    }

    // joint simple-path phase for query-injective semantics
    bool qinj_paths(std::size_t atom_idx, std::vector<char>& used,
                    std::vector<std::vector<int>>* paths_out) {
        if (atom_idx == q.atoms.size()) return true;
        const Atom& a = q.atoms[atom_idx];
        int u = mu.at(a.src), v = mu.at(a.dst);

        // enumerate candidate simple paths with internals avoiding `used`
        std::vector<int> path{u};
        std::vector<char> visited(ix.nodes.size(), 0);
        std::function<bool(int, std::vector<char>&)> dfs =
            [&](int node, std::vector<char>& states) {
                budget.tick();
                for (const auto& [l, w] : ix.out[node]) {
                    std::vector<char> next = machines[atom_idx].step(states, l);
                    bool any = false;
                    for (char c : next)
                        if (c) {
                            any = true;
                            break;
                        }
                    if (!any) continue;
                    if (w == v) {
                        if (machines[atom_idx].any_final(next)) {
                            // candidate complete; commit internals, go deeper
                            std::vector<int> internals(path.begin() + 1, path.end());
                            for (int x : internals) used[x] = 1;
                            path.push_back(w);
                            bool ok = qinj_paths(atom_idx + 1, used, paths_out);
                            if (ok && paths_out) (*paths_out)[atom_idx] = path;
                            path.pop_back();
                            for (int x : internals) used[x] = 0;
                            if (ok) return true;
                        }
                        continue;
                    }
                    if (visited[w] || used[w]) continue;
                    visited[w] = 1;
                    path.push_back(w);
                    bool done = dfs(w, next);
                    path.pop_back();
                    visited[w] = 0;
                    if (done) return true;
                }
                return false;
            };

        std::vector<char> start = machines[atom_idx].start_states();
        visited[u] = 1;
        return dfs(u, start);
    }

    // existential completion from the current partial mu
    bool complete(std::size_t depth, std::vector<std::vector<int>>* paths_out) {
        if (depth == order.size()) {
            if (sem != Semantics::QInj) {
                if (paths_out) {
                    for (std::size_t i = 0; i < q.atoms.size(); ++i) {
                        const Atom& a = q.atoms[i];
                        int u = mu.at(a.src), v = mu.at(a.dst);
                        if (sem == Semantics::St) {
                            (*paths_out)[i] = machine_reach_path(ix, machines[i], u, v, budget);
                        } else {
                            std::vector<char> blocked(ix.nodes.size(), 0);
                            auto p = simple_path_search(ix, machines[i], u, v, blocked, budget);
                            (*paths_out)[i] = *p;
                        }
                    }
                }
                return true;
            }
            std::vector<char> used(ix.nodes.size(), 0);
            for (const auto& [v, n] : mu) used[n] = 1;
            return qinj_paths(0, used, paths_out);
        }
        const Var& v = order[depth];
        if (mu.count(v)) return complete(depth + 1, paths_out);
        for (int n = 0; n < static_cast<int>(ix.nodes.size()); ++n) {
            mu[v] = n;
            if (consistent(v) && complete(depth + 1, paths_out)) return true;
            mu.erase(v);
        }
        return false;
    }

    void set_order() {
        order = q.vars;
        std::stable_sort(order.begin(), order.end(), [&](const Var& a, const Var& b) {
            return incident.at(a).size() > incident.at(b).size();
        });
    }
};

// All assignments of the disjunct's distinct free variables.
void for_each_free_assignment(const Crpq& q, const Indexed& ix,
                              const std::function<void(std::map<Var, int>&)>& fn) {
    std::vector<Var> fvs;
    for (const Var& v : q.free_vars)
        if (std::find(fvs.begin(), fvs.end(), v) == fvs.end()) fvs.push_back(v);
    std::map<Var, int> mu;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == fvs.size()) {
            fn(mu);
            return;
        }
        for (int n = 0; n < static_cast<int>(ix.nodes.size()); ++n) {
            mu[fvs[i]] = n;
            rec(i + 1);
        }
        mu.erase(fvs[i]);
    };
    rec(0);
}

} // namespace

bool st_reach(const GraphDb& g, const Node& u, const Node& v, const Nfa& n) {
    Indexed ix(g);
    int ui = ix.id(u), vi = ix.id(v);
    if (ui < 0 || vi < 0) return false;
    AtomMachine m(n, ix);
    Budget budget{default_step_budget()};
    return machine_reach(ix, m, ui, vi, budget);
}

std::set<std::vector<Node>> evaluate(const Crpq& q, const GraphDb& g, Semantics sem,
                                     const EvalOptions& opts) {
    Budget budget{opts.step_budget > 0 ? opts.step_budget : default_step_budget()};
    Indexed ix(g);
    std::set<std::vector<Node>> result;
    CrpqUnion u = eliminate_epsilon(q);
    for (const Crpq& d : u.disjuncts) {
        DisjunctEval ev(d, ix, sem, budget);
        ev.set_order();
        for_each_free_assignment(d, ix, [&](std::map<Var, int>& mu_free) {
            ev.mu = mu_free;
            bool injective_ok = true;
            if (sem == Semantics::QInj) {
                std::map<int, Var> rev;
                for (const auto& [var, n] : mu_free) {
                    auto [it, fresh] = rev.emplace(n, var);
                    if (!fresh) injective_ok = false;
                }
            }
            if (injective_ok) {
                bool feasible = true;
                for (const auto& [var, n] : ev.mu)
                    if (!ev.consistent(var)) {
                        feasible = false;
                        break;
                    }
                if (feasible && ev.complete(0, nullptr)) {
                    std::vector<Node> tuple;
                    for (const Var& v : d.free_vars) tuple.push_back(ix.nodes[ev.mu.at(v)]);
                    result.insert(std::move(tuple));
                }
            }
            ev.mu.clear();
        });
    }
    return result;
}

bool eval_membership(const Crpq& q, const GraphDb& g, const std::vector<Node>& tuple,
                     Semantics sem, const EvalOptions& opts) {
    if (tuple.size() != q.arity()) throw domain_error("eval_membership: arity mismatch");
    return !find_matches(q, g, tuple, sem, 1, opts).empty();
}

std::vector<MatchWitness> find_matches(const Crpq& q, const GraphDb& g,
                                       const std::vector<Node>& tuple, Semantics sem,
                                       std::size_t limit, const EvalOptions& opts) {
    if (tuple.size() != q.arity()) throw domain_error("find_matches: arity mismatch");
    return find_matches_prepared(eliminate_epsilon(q), g, tuple, sem, limit, opts);
}

std::vector<MatchWitness> find_matches_prepared(const CrpqUnion& u, const GraphDb& g,
                                                const std::vector<Node>& tuple,
                                                Semantics sem, std::size_t limit,
                                                const EvalOptions& opts) {
    Budget budget{opts.step_budget > 0 ? opts.step_budget : default_step_budget()};
    Indexed ix(g);
    std::vector<MatchWitness> out;
    for (const Crpq& d : u.disjuncts) {
        if (tuple.size() != d.arity())
            throw domain_error("find_matches: arity mismatch");
        if (out.size() >= limit) break;
        DisjunctEval ev(d, ix, sem, budget);
        ev.set_order();
        // anchor the free tuple
        bool ok = true;
        for (std::size_t i = 0; i < tuple.size() && ok; ++i) {
            int n = ix.id(tuple[i]);
            if (n < 0) {
                ok = false;
                break;
            }
            auto it = ev.mu.find(d.free_vars[i]);
            if (it != ev.mu.end()) {
                if (it->second != n) ok = false;
            } else {
                ev.mu[d.free_vars[i]] = n;
            }
        }
        if (ok && sem == Semantics::QInj) {
            std::map<int, Var> rev;
            for (const auto& [var, n] : ev.mu)
                if (!rev.emplace(n, var).second) ok = false;
        }
        if (ok)
            for (const auto& [var, n] : ev.mu)
                if (!ev.consistent(var)) {
                    ok = false;
                    break;
                }
        if (!ok) continue;
        std::vector<std::vector<int>> paths(d.atoms.size());
        if (ev.complete(0, &paths)) {
            MatchWitness w;
            for (const auto& [var, n] : ev.mu) w.mu[var] = ix.nodes[n];
            w.disjunct = d;
            for (const auto& p : paths) {
                std::vector<Node> names;
                for (int n : p) names.push_back(ix.nodes[n]);
                w.atom_paths.push_back(std::move(names));
            }
            out.push_back(std::move(w));
        }
    }
    return out;
}

} // namespace crpq
