#include "crpq/qinj.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <map>
#include <sstream>

#include "crpq/errors.hpp"

namespace crpq {

bool Rel::any() const {
    for (std::uint64_t b : bits)
        if (b) return true;
    return false;
}

bool Profile::operator<(const Profile& o) const {
    if (!(full_run == o.full_run)) return full_run < o.full_run;
    if (!(split == o.split)) return split < o.split;
    if (!(split_gap == o.split_gap)) return split_gap < o.split_gap;
    return infix < o.infix;
}

// ---------------------------------------------------------------------------
// Joint automaton

JointNfa build_joint_nfa(const Crpq& q2, const std::vector<Symbol>& extra_alphabet) {
    for (const Atom& a : q2.atoms)
        if (regex_nullable(a.lang))
            throw domain_error("build_joint_nfa: q2 must be ε-free (normalize first)");

    std::set<Symbol> sigma(q2.alphabet.begin(), q2.alphabet.end());
    sigma.insert(extra_alphabet.begin(), extra_alphabet.end());
    JointNfa joint;
    joint.alphabet.assign(sigma.begin(), sigma.end());

    joint.nfa.n = 0;
    for (const Atom& a : q2.atoms) {
        Nfa c = complete_cocomplete(a.nfa, joint.alphabet);
        JointNfa::AtomStates reg;
        reg.lo = joint.nfa.n;
        reg.hi = joint.nfa.n + c.n;
        for (int q = 0; q < c.n; ++q) {
            joint.nfa.initial.push_back(c.initial[q]);
            joint.nfa.final.push_back(c.final[q]);
            joint.nfa.trans.emplace_back();
            for (const auto& [sym, t] : c.trans[q])
                joint.nfa.trans.back().push_back({sym, t + reg.lo});
            if (c.initial[q]) reg.initials.push_back(q + reg.lo);
            if (c.final[q]) reg.finals.push_back(q + reg.lo);
        }
        joint.nfa.n += c.n;
        joint.atoms.push_back(std::move(reg));
    }
    return joint;
}

// ---------------------------------------------------------------------------
// Profiles

namespace {

// Scan state over the joint automaton after reading some prefix p of a word:
//   R   runs over the whole of p
//   C   states reaching a final state on some nonempty prefix of p
//   T   Split pairs of p (p = u·v with both halves nonempty)
//   D   SplitGap pairs of p (p = u·s·v, all nonempty)
//   Cur runs over factors of p that start at position >= 1 and end at |p|
//   N   runs over factors starting >= 1 that already have a nonempty right gap
struct ScanState {
    Rel r, t, d, cur, n;
    std::vector<char> c;

    bool operator<(const ScanState& o) const {
        if (!(r == o.r)) return r < o.r;
        if (!(t == o.t)) return t < o.t;
        if (!(d == o.d)) return d < o.d;
        if (!(cur == o.cur)) return cur < o.cur;
        if (!(n == o.n)) return n < o.n;
        return c < o.c;
    }
};

struct Stepper {
    int n;
    std::map<Symbol, Rel> tr;
    std::map<Symbol, std::vector<char>> b1;  // states reached from an initial on a
    std::vector<char> is_final, is_initial;

    explicit Stepper(const JointNfa& joint) : n(joint.nfa.n) {
        is_final.assign(n, 0);
        is_initial.assign(n, 0);
        for (int q = 0; q < n; ++q) {
            is_final[q] = joint.nfa.final[q];
            is_initial[q] = joint.nfa.initial[q];
        }
        for (int q = 0; q < n; ++q)
            for (const auto& [sym, t] : joint.nfa.trans[q]) {
                auto it = tr.find(sym);
                if (it == tr.end()) {
                    it = tr.emplace(sym, Rel(n)).first;
                    b1.emplace(sym, std::vector<char>(n, 0));
                }
                it->second.set(q, t);
                if (is_initial[q]) b1[sym][t] = 1;
            }
    }

    Rel compose(const Rel& x, const Rel& step) const {
        Rel out(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (!x.get(i, j)) continue;
                for (int k = 0; k < n; ++k)
                    if (step.get(j, k)) out.set(i, k);
            }
        return out;
    }

    ScanState initial_state() const {
        ScanState s;
        s.r = Rel(n);
        for (int i = 0; i < n; ++i) s.r.set(i, i);
        s.t = Rel(n);
        s.d = Rel(n);
        s.cur = Rel(n);
        s.n = Rel(n);
        s.c.assign(n, 0);
        return s;
    }

    // consume one letter; `pos` = number of letters consumed so far
    ScanState advance(const ScanState& s, const Symbol& a, std::size_t pos) const {
        static const Rel empty_rel;
        auto it = tr.find(a);
        const Rel& step = it == tr.end() ? empty_rel : it->second;
        bool have = it != tr.end();
        std::vector<char> no_b(n, 0);
        const std::vector<char>& b = have ? b1.at(a) : no_b;

        ScanState out;
        out.r = have ? compose(s.r, step) : Rel(n);
        // T' = T·step ∪ A(prefix) × B_a, split point just before this letter
        out.t = have ? compose(s.t, step) : Rel(n);
        if (pos >= 1) {
            for (int i = 0; i < n; ++i) {
                bool reaches_final = false;
                for (int j = 0; j < n && !reaches_final; ++j)
                    if (s.r.get(i, j) && is_final[j]) reaches_final = true;
                if (!reaches_final) continue;
                for (int j = 0; j < n; ++j)
                    if (b[j]) out.t.set(i, j);
            }
        }
        // D' = D·step ∪ C × B_a, gap of length >= 1 before the suffix
        out.d = have ? compose(s.d, step) : Rel(n);
        for (int i = 0; i < n; ++i)
            if (s.c[i])
                for (int j = 0; j < n; ++j)
                    if (b[j]) out.d.set(i, j);
        // C holds states reaching a final on a PROPER nonempty prefix, so the
        // update folds in the pre-step run relation (full old prefix), not the
        // new one.
        out.c = s.c;
        if (pos >= 1)
            for (int i = 0; i < n; ++i) {
                if (out.c[i]) continue;
                for (int j = 0; j < n; ++j)
                    if (s.r.get(i, j) && is_final[j]) {
                        out.c[i] = 1;
                        break;
                    }
            }
        // Cur' = Cur·step ∪ (pos >= 1 ? step : ∅);  N' = N ∪ Cur
        out.cur = have ? compose(s.cur, step) : Rel(n);
        if (pos >= 1 && have)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (step.get(i, j)) out.cur.set(i, j);
        out.n = s.n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (s.cur.get(i, j)) out.n.set(i, j);
        return out;
    }

    Profile extract(const ScanState& s) const {
        Profile p;
        p.full_run = s.r;
        p.split = s.t;
        p.split_gap = s.d;
        p.infix = s.n;
        return p;
    }
};

} // namespace

Profile profile_of_word(const Word& w, const JointNfa& joint) {
    if (w.empty()) throw domain_error("profile_of_word: atoms are ε-free here");
    Stepper stepper(joint);
    ScanState s = stepper.initial_state();
    for (std::size_t i = 0; i < w.size(); ++i) s = stepper.advance(s, w[i], i);
    return stepper.extract(s);
}

std::set<Profile> achievable_profiles(const Nfa& atom_lang, const JointNfa& joint,
                                      std::size_t state_cap) {
    Stepper stepper(joint);
    std::set<Symbol> sigma_set(joint.alphabet.begin(), joint.alphabet.end());
    {
        auto s = atom_lang.symbols();
        sigma_set.insert(s.begin(), s.end());
    }
    std::vector<char> co = nfa_coreachable(atom_lang);

    // The scan's position dependence collapses to {0, >=1}, so the product
    // state space is (scan state, consumed >= 1?, determinized atom states).
    struct Product {
        ScanState scan;
        bool moved;
        std::set<int> lang;
        bool operator<(const Product& o) const {
            if (moved != o.moved) return moved < o.moved;
            if (scan < o.scan) return true;
            if (o.scan < scan) return false;
            return lang < o.lang;
        }
    };

    std::set<Profile> out;
    std::set<Product> seen;
    std::deque<Product> queue;
    Product start{stepper.initial_state(), false, atom_lang.initial_states()};
    seen.insert(start);
    queue.push_back(start);

    while (!queue.empty()) {
        Product prod = queue.front();
        queue.pop_front();
        for (const Symbol& a : sigma_set) {
            std::set<int> next_lang;
            for (int q : prod.lang)
                for (const auto& [sym, t] : atom_lang.trans[q])
                    if (sym == a && co[t]) next_lang.insert(t);
            if (next_lang.empty()) continue;
            Product next{stepper.advance(prod.scan, a, prod.moved ? 1 : 0), true,
                         std::move(next_lang)};
            bool accepting = false;
            for (int q : next.lang)
                if (atom_lang.final[q]) accepting = true;
            if (accepting) out.insert(stepper.extract(next.scan));
            if (seen.insert(next).second) {
                if (seen.size() > state_cap)
                    throw resource_error("achievable_profiles: state cap exceeded");
                queue.push_back(next);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Abstraction stream

AbstractionStream::AbstractionStream(const Crpq& q1, const JointNfa& joint,
                                     std::size_t state_cap, std::size_t product_cap) {
    per_atom_.reserve(q1.atoms.size());
    std::size_t product = 1;
    for (const Atom& a : q1.atoms) {
        std::set<Profile> profiles = achievable_profiles(a.nfa, joint, state_cap);
        per_atom_.emplace_back(profiles.begin(), profiles.end());
        if (per_atom_.back().empty()) {
            exhausted_ = true;  // an atom with empty language has no expansions
            return;
        }
        product *= per_atom_.back().size();
        if (product > product_cap)
            throw resource_error("enumerate_abstractions: product cap exceeded");
    }
    total_ = product;
    odo_.assign(per_atom_.size(), 0);
}

std::optional<Abstraction> AbstractionStream::next() {
    if (exhausted_) return std::nullopt;
    Abstraction abs;
    for (std::size_t i = 0; i < per_atom_.size(); ++i)
        abs.push_back(per_atom_[i][odo_[i]]);
    if (odo_.empty()) {
        exhausted_ = true;
        return abs;
    }
    std::size_t i = 0;
    while (i < odo_.size() && ++odo_[i] == per_atom_[i].size()) odo_[i++] = 0;
    if (i == odo_.size()) exhausted_ = true;
    return abs;
}

// ---------------------------------------------------------------------------
// Skeleton and morphism-type enumeration

namespace {

std::string subdiv_name(std::size_t atom, int which) {
    return "A" + std::to_string(atom) + "." + std::to_string(which);
}

struct Skeleton {
    std::vector<std::string> nodes;
    std::map<std::string, int> id;
    std::vector<std::vector<std::pair<int, int>>> out;  // node -> (edge id, target)
    std::vector<std::pair<int, int>> edge_coord;        // edge -> (q1 atom, offset 0..2)

    int add(const std::string& name) {
        auto it = id.find(name);
        if (it != id.end()) return it->second;
        int k = static_cast<int>(nodes.size());
        nodes.push_back(name);
        id[name] = k;
        out.emplace_back();
        return k;
    }
};

Skeleton build_skeleton(const Crpq& q1) {
    Skeleton g;
    for (const Var& v : q1.vars) g.add(v);
    for (std::size_t i = 0; i < q1.atoms.size(); ++i) {
        std::array<int, 4> p{g.add(q1.atoms[i].src), g.add(subdiv_name(i, 1)),
                             g.add(subdiv_name(i, 2)), g.add(q1.atoms[i].dst)};
        for (int k = 0; k < 3; ++k) {
            int e = static_cast<int>(g.edge_coord.size());
            g.edge_coord.push_back({static_cast<int>(i), k});
            g.out[p[k]].push_back({e, p[k + 1]});
        }
    }
    return g;
}

struct MtEnumerator {
    const Crpq& q2;
    Skeleton g;
    std::vector<Var> q2_vars;
    std::map<Var, int> placement;
    std::vector<char> node_used;   // by variable placements and path internals
    std::vector<char> edge_used;
    std::vector<std::vector<int>> paths;
    std::vector<MorphismType> out;

    MtEnumerator(const Crpq& q1, const Crpq& q2_) : q2(q2_), g(build_skeleton(q1)) {
        q2_vars = q2.vars;
        node_used.assign(g.nodes.size(), 0);
        edge_used.assign(g.edge_coord.size(), 0);
        paths.resize(q2.atoms.size());
    }

    void emit() {
        MorphismType mt;
        for (const auto& [v, n] : placement) mt.var_placement[v] = g.nodes[n];
        for (const auto& p : paths) {
            std::vector<std::string> named;
            for (int n : p) named.push_back(g.nodes[n]);
            mt.paths.push_back(std::move(named));
        }
        out.push_back(std::move(mt));
    }

    void paths_for_atom(std::size_t ai) {
        if (ai == q2.atoms.size()) {
            emit();
            return;
        }
        int from = placement.at(q2.atoms[ai].src);
        int to = placement.at(q2.atoms[ai].dst);
        std::vector<int>& path = paths[ai];
        path = {from};
        std::vector<int> committed;  // internal nodes marked used

        std::function<void(int)> dfs = [&](int node) {
            for (const auto& [e, w] : g.out[node]) {
                if (edge_used[e]) continue;
                if (w == to) {
                    edge_used[e] = 1;
                    path.push_back(w);
                    for (std::size_t k = 1; k + 1 < path.size(); ++k)
                        node_used[path[k]] = 1;
                    paths_for_atom(ai + 1);
                    for (std::size_t k = 1; k + 1 < path.size(); ++k)
                        node_used[path[k]] = 0;
                    path.pop_back();
                    edge_used[e] = 0;
                    continue;  // simple paths may not pass through the target
                }
                if (node_used[w]) continue;
                bool on_path = false;
                for (int x : path)
                    if (x == w) on_path = true;
                if (on_path) continue;
                edge_used[e] = 1;
                path.push_back(w);
                dfs(w);
                path.pop_back();
                edge_used[e] = 0;
            }
        };
        dfs(from);
        path.clear();
    }

    void assign_vars(std::size_t vi, const std::map<Var, int>& pinned) {
        if (vi == q2_vars.size()) {
            paths_for_atom(0);
            return;
        }
        const Var& v = q2_vars[vi];
        auto it = pinned.find(v);
        if (it != pinned.end()) {
            if (node_used[it->second]) return;
            placement[v] = it->second;
            node_used[it->second] = 1;
            assign_vars(vi + 1, pinned);
            node_used[it->second] = 0;
            placement.erase(v);
            return;
        }
        for (int n = 0; n < static_cast<int>(g.nodes.size()); ++n) {
            if (node_used[n]) continue;
            placement[v] = n;
            node_used[n] = 1;
            assign_vars(vi + 1, pinned);
            node_used[n] = 0;
            placement.erase(v);
        }
    }
};

} // namespace

std::vector<MorphismType> enumerate_morphism_types(const Crpq& q1, const Crpq& q2) {
    if (q1.arity() != q2.arity())
        throw domain_error("morphism types require equal free-variable arity");
    MtEnumerator en(q1, q2);

    std::map<Var, int> pinned;
    for (std::size_t i = 0; i < q2.free_vars.size(); ++i) {
        auto it = en.g.id.find(q1.free_vars[i]);
        if (it == en.g.id.end()) return {};
        auto [jt, fresh] = pinned.emplace(q2.free_vars[i], it->second);
        if (!fresh && jt->second != it->second) return {};
    }
    {
        std::map<int, Var> rev;
        for (const auto& [v, n] : pinned)
            if (!rev.emplace(n, v).second) return {};
    }
    en.assign_vars(0, pinned);
    return en.out;
}

// ---------------------------------------------------------------------------
// Compatibility

namespace {

// One end of a marker demand: a λ junction, the initials/finals of a q2
// atom's automaton, or unconstrained.
struct EndSpec {
    enum Kind { Lambda, Initials, Finals, Any } kind = Any;
    int index = -1;  // junction id or q2 atom
};

struct MarkerDemand {
    enum Family { FullRun, Split, SplitGap, Infix } family;
    int q1_atom;
    EndSpec left, right;
};

struct CompatProblem {
    std::vector<std::pair<int, int>> junctions;  // (q2 atom, H-path node index)
    std::vector<MarkerDemand> demands;

    int junction(std::map<std::pair<int, int>, int>& ids, int atom, int pos) {
        auto key = std::make_pair(atom, pos);
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(junctions.size());
        ids[key] = id;
        junctions.push_back(key);
        return id;
    }
};

// maximal run of H-path edges inside one q1 atom
struct Segment {
    int q2_atom;
    int start_pos, end_pos;  // node indices in the H path
    int off_lo, off_hi;      // skeleton offsets covered (0..2)
    int q1_atom;
    bool at_path_start() const { return start_pos == 0; }
};

} // namespace

bool is_compatible(const MorphismType& mt, const Abstraction& abs, const Crpq& q1,
                   const Crpq& q2, const JointNfa& joint) {
    // skeleton coordinates of each node name
    std::map<std::string, std::vector<std::pair<int, int>>> coords;
    for (std::size_t i = 0; i < q1.atoms.size(); ++i) {
        coords[q1.atoms[i].src].push_back({static_cast<int>(i), 0});
        coords[subdiv_name(i, 1)].push_back({static_cast<int>(i), 1});
        coords[subdiv_name(i, 2)].push_back({static_cast<int>(i), 2});
        coords[q1.atoms[i].dst].push_back({static_cast<int>(i), 3});
    }
    auto edge_coord = [&](const std::string& a,
                          const std::string& b) -> std::pair<int, int> {
        for (const auto& [atom, off] : coords[a])
            for (const auto& [atom2, off2] : coords[b])
                if (atom == atom2 && off2 == off + 1) return {atom, off};
        throw domain_error("morphism type contains a non-skeleton edge");
    };

    // split every H path into maximal in-atom segments
    std::vector<Segment> segments;
    std::vector<int> path_len(mt.paths.size());
    for (std::size_t ai = 0; ai < mt.paths.size(); ++ai) {
        const auto& path = mt.paths[ai];
        int len = static_cast<int>(path.size()) - 1;
        path_len[ai] = len;
        int i = 0;
        while (i < len) {
            auto [atom, off] = edge_coord(path[i], path[i + 1]);
            int j = i, hi = off;
            while (j + 1 < len) {
                auto [atom2, off2] = edge_coord(path[j + 1], path[j + 2]);
                if (atom2 != atom || off2 != hi + 1) break;
                hi = off2;
                ++j;
            }
            segments.push_back(
                {static_cast<int>(ai), i, j + 1, off, hi, atom});
            i = j + 1;
        }
    }

    CompatProblem prob;
    std::map<std::pair<int, int>, int> junction_ids;
    auto left_spec = [&](const Segment& s) {
        if (s.at_path_start()) return EndSpec{EndSpec::Initials, s.q2_atom};
        return EndSpec{EndSpec::Lambda,
                       prob.junction(junction_ids, s.q2_atom, s.start_pos)};
    };
    auto right_spec = [&](const Segment& s) {
        if (s.end_pos == path_len[s.q2_atom]) return EndSpec{EndSpec::Finals, s.q2_atom};
        return EndSpec{EndSpec::Lambda,
                       prob.junction(junction_ids, s.q2_atom, s.end_pos)};
    };

    std::map<int, std::vector<const Segment*>> arriving, departing;
    for (const Segment& s : segments) {
        if (s.off_lo == 0 && s.off_hi == 2) {
            prob.demands.push_back(
                {MarkerDemand::FullRun, s.q1_atom, left_spec(s), right_spec(s)});
        } else if (s.off_lo == 0) {
            // ends strictly inside: the H path terminates here
            prob.demands.push_back(
                {MarkerDemand::Split, s.q1_atom, left_spec(s), EndSpec{EndSpec::Any, -1}});
            arriving[s.q1_atom].push_back(&s);
        } else if (s.off_hi == 2) {
            // starts strictly inside
            prob.demands.push_back(
                {MarkerDemand::Split, s.q1_atom, EndSpec{EndSpec::Any, -1}, right_spec(s)});
            departing[s.q1_atom].push_back(&s);
        } else {
            // the middle edge alone: a single-edge path strictly inside
            prob.demands.push_back({MarkerDemand::Infix, s.q1_atom,
                                    EndSpec{EndSpec::Initials, s.q2_atom},
                                    EndSpec{EndSpec::Finals, s.q2_atom}});
        }
    }
    // pairs inside one q1 atom: an arriving segment meets a departing one
    for (const auto& [atom, arr] : arriving) {
        auto it = departing.find(atom);
        if (it == departing.end()) continue;
        for (const Segment* a : arr)
            for (const Segment* d : it->second) {
                const std::string& inner_a = mt.paths[a->q2_atom][a->end_pos];
                const std::string& inner_d = mt.paths[d->q2_atom][d->start_pos];
                bool meet = inner_a == inner_d;  // same skeleton node = same H node
                prob.demands.push_back({meet ? MarkerDemand::Split
                                             : MarkerDemand::SplitGap,
                                        atom, left_spec(*a), right_spec(*d)});
            }
    }

    // solve for λ by backtracking over junction states
    auto states_of = [&](const EndSpec& spec,
                         const std::vector<int>& lambda) -> std::vector<int> {
        switch (spec.kind) {
            case EndSpec::Lambda:
                if (lambda[spec.index] < 0) return {};  // unassigned
                return {lambda[spec.index]};
            case EndSpec::Initials: return joint.atoms[spec.index].initials;
            case EndSpec::Finals: return joint.atoms[spec.index].finals;
            case EndSpec::Any: {
                std::vector<int> all(joint.nfa.n);
                for (int i = 0; i < joint.nfa.n; ++i) all[i] = i;
                return all;
            }
        }
        return {};
    };
    auto demand_holds = [&](const MarkerDemand& d, const std::vector<int>& lambda,
                            bool partial) -> bool {
        if (partial) {
            // skip demands whose λ ends are not yet assigned
            if (d.left.kind == EndSpec::Lambda && lambda[d.left.index] < 0) return true;
            if (d.right.kind == EndSpec::Lambda && lambda[d.right.index] < 0) return true;
        }
        const Rel& rel = [&]() -> const Rel& {
            const Profile& p = abs[d.q1_atom];
            switch (d.family) {
                case MarkerDemand::FullRun: return p.full_run;
                case MarkerDemand::Split: return p.split;
                case MarkerDemand::SplitGap: return p.split_gap;
                case MarkerDemand::Infix: return p.infix;
            }
            return p.full_run;
        }();
        for (int l : states_of(d.left, lambda))
            for (int r : states_of(d.right, lambda))
                if (rel.get(l, r)) return true;
        return false;
    };

    std::vector<int> lambda(prob.junctions.size(), -1);
    std::function<bool(std::size_t)> solve = [&](std::size_t ji) -> bool {
        if (ji == prob.junctions.size()) {
            for (const MarkerDemand& d : prob.demands)
                if (!demand_holds(d, lambda, false)) return false;
            return true;
        }
        int atom = prob.junctions[ji].first;
        for (int q = joint.atoms[atom].lo; q < joint.atoms[atom].hi; ++q) {
            lambda[ji] = q;
            bool ok = true;
            for (const MarkerDemand& d : prob.demands)
                if (!demand_holds(d, lambda, true)) {
                    ok = false;
                    break;
                }
            if (ok && solve(ji + 1)) return true;
            lambda[ji] = -1;
        }
        return false;
    };
    (void)q2;
    return solve(0);
}

// ---------------------------------------------------------------------------
// The decider

namespace {

// deduplicate syntactically identical atoms (set semantics of conjunctions)
Crpq dedupe_atoms(const Crpq& q) {
    std::set<std::string> seen;
    std::vector<Atom> atoms;
    for (const Atom& a : q.atoms) {
        std::string key = a.src + "\x1f" + a.dst + "\x1f" + print_regex(a.lang);
        if (seen.insert(key).second) atoms.push_back(a);
    }
    Crpq out = make_crpq(q.free_vars, atoms);
    std::set<Var> vars(out.vars.begin(), out.vars.end());
    vars.insert(q.vars.begin(), q.vars.end());
    out.vars.assign(vars.begin(), vars.end());
    return out;
}

// Remark-style restriction: no two distinct atoms with the same endpoints may
// share a single-letter word.
void reject_duplicate_letters(const Crpq& q, const std::string& side) {
    for (std::size_t i = 0; i < q.atoms.size(); ++i)
        for (std::size_t j = i + 1; j < q.atoms.size(); ++j) {
            const Atom& a = q.atoms[i];
            const Atom& b = q.atoms[j];
            if (a.src != b.src || a.dst != b.dst) continue;
            for (const Word& w : nfa_words_upto(a.nfa, 1)) {
                if (w.size() != 1) continue;
                if (b.nfa.accepts(w))
                    throw domain_error(
                        side + " query has two atoms " + a.src + " -> " + a.dst +
                        " sharing the single-letter word '" + w[0] +
                        "'; the query-injective decider requires this duplication "
                        "to be rewritten away first");
            }
        }
}

Crpq normalize_disjunct(const Crpq& d, const std::string& side) {
    Crpq out = dedupe_atoms(merge_chain_atoms(d));
    reject_duplicate_letters(out, side);
    return out;
}

std::string render_profile(const Profile& p, const JointNfa& joint) {
    std::ostringstream out;
    auto dump = [&](const char* name, const Rel& r) {
        out << name << "{";
        bool first = true;
        int emitted = 0;
        for (int i = 0; i < joint.nfa.n && emitted < 40; ++i)
            for (int j = 0; j < joint.nfa.n && emitted < 40; ++j)
                if (r.get(i, j)) {
                    if (!first) out << ",";
                    first = false;
                    out << i << "-" << j;
                    ++emitted;
                }
        out << "} ";
    };
    dump("full", p.full_run);
    dump("split", p.split);
    dump("splitgap", p.split_gap);
    dump("infix", p.infix);
    return out.str();
}

} // namespace

QinjResult contains_qinj(const Crpq& q1, const Crpq& q2, const QinjOptions& opts) {
    if (q1.arity() != q2.arity())
        throw domain_error("containment requires equal free-variable arity");
    std::size_t cap = opts.disjunct_cap ? opts.disjunct_cap : default_disjunct_cap();

    std::vector<Crpq> left, right;
    for (const Crpq& d : eliminate_epsilon(q1, cap).disjuncts)
        left.push_back(normalize_disjunct(d, "left"));
    for (const Crpq& d : eliminate_epsilon(q2, cap).disjuncts)
        right.push_back(normalize_disjunct(d, "right"));

    // one joint automaton across all right-hand disjuncts
    std::vector<Atom> all_atoms;
    std::vector<std::size_t> offset;  // disjunct -> first atom index
    for (const Crpq& d : right) {
        offset.push_back(all_atoms.size());
        for (const Atom& a : d.atoms) all_atoms.push_back(a);
    }
    std::set<Symbol> extra(q1.alphabet.begin(), q1.alphabet.end());
    extra.insert(q2.alphabet.begin(), q2.alphabet.end());
    Crpq combined = make_crpq({}, all_atoms);
    JointNfa joint = build_joint_nfa(combined, {extra.begin(), extra.end()});

    for (const Crpq& d1 : left) {
        // morphism types of every right disjunct into this left disjunct,
        // with the joint registry narrowed to the disjunct's own atoms
        std::vector<std::pair<JointNfa, std::vector<MorphismType>>> rights;
        for (std::size_t j = 0; j < right.size(); ++j) {
            JointNfa view;
            view.nfa = joint.nfa;
            view.alphabet = joint.alphabet;
            for (std::size_t k = 0; k < right[j].atoms.size(); ++k)
                view.atoms.push_back(joint.atoms[offset[j] + k]);
            rights.push_back({std::move(view), enumerate_morphism_types(d1, right[j])});
        }

        AbstractionStream stream(d1, joint, opts.profile_state_cap,
                                 opts.abstraction_cap);
        while (auto abs = stream.next()) {
            bool covered = false;
            for (std::size_t j = 0; j < rights.size() && !covered; ++j) {
                const auto& [view, mts] = rights[j];
                for (const MorphismType& mt : mts)
                    if (is_compatible(mt, *abs, d1, right[j], view)) {
                        covered = true;
                        break;
                    }
            }
            if (!covered) {
                std::ostringstream dump;
                dump << "no compatible morphism type for abstraction of "
                     << print_query(d1) << ":\n";
                for (std::size_t i = 0; i < abs->size(); ++i)
                    dump << "  atom " << i << ": " << render_profile((*abs)[i], joint)
                         << "\n";
                return {false, dump.str()};
            }
        }
    }
    return {true, ""};
}

} // namespace crpq
