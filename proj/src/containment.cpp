#include "crpq/containment.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <functional>
#include <map>
#include <sstream>

#include "crpq/errors.hpp"
#include "crpq/morphism.hpp"
#include "crpq/qinj.hpp"

namespace crpq {

ContainmentVerdict ContainmentVerdict::contained(std::string decider) {
    ContainmentVerdict v;
    v.kind = Verdict::Contained;
    v.decider = std::move(decider);
    return v;
}

ContainmentVerdict ContainmentVerdict::not_contained(std::string decider,
                                                     AinjExpansion w) {
    ContainmentVerdict v;
    v.kind = Verdict::NotContained;
    v.decider = std::move(decider);
    v.witness = std::move(w);
    return v;
}

ContainmentVerdict ContainmentVerdict::unknown(std::string decider, std::size_t bound) {
    ContainmentVerdict v;
    v.kind = Verdict::Unknown;
    v.decider = std::move(decider);
    v.bound = bound;
    return v;
}

std::size_t default_max_len(const Crpq& q1) {
    std::size_t states = 0;
    for (const Atom& a : q1.atoms) states += static_cast<std::size_t>(a.nfa.n);
    return 2 * states + q1.vars.size();
}

namespace {

long long default_partition_budget() {
    if (const char* env = std::getenv("CRPQ_PARTITION_BUDGET")) {
        long long v = std::atoll(env);
        if (v > 0) return v;
    }
    return 300000;
}

// Longest word over all atoms; nullopt when some language is infinite.
std::optional<std::size_t> longest_word(const Crpq& q) {
    std::size_t longest = 0;
    for (const Atom& a : q.atoms) {
        auto ml = regex_max_len(a.lang);
        if (!ml) return std::nullopt;
        longest = std::max(longest, *ml);
    }
    return longest;
}

std::vector<Node> free_nodes(const Crpq& cq) {
    return std::vector<Node>(cq.free_vars.begin(), cq.free_vars.end());
}

GraphDb witness_db(const Crpq& cq) { return canonical_db(cq); }

// All distinct unordered class pairs appearing along one witness path whose
// merge is admissible; merging any of them breaks the match component.
void destroy_pairs(const std::vector<Node>& path,
                   std::set<std::pair<Var, Var>>& out) {
    std::vector<Node> nodes(path.begin(), path.end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j)
            out.insert({nodes[i], nodes[j]});
}

// Merge two quotient classes of f and renormalize to an RGS partition.
std::optional<AinjExpansion> merge_classes(const AinjExpansion& f, const Var& a,
                                           const Var& b) {
    const auto& vars = f.base.cq.vars;
    std::vector<int> block = f.block_of;
    int ba = -1, bb = -1;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (f.phi.at(vars[i]) == a) ba = block[i];
        if (f.phi.at(vars[i]) == b) bb = block[i];
    }
    if (ba < 0 || bb < 0 || ba == bb) return std::nullopt;
    for (int& x : block)
        if (x == bb) x = ba;
    // renormalize to restricted growth form
    std::map<int, int> rename;
    for (int& x : block) {
        auto it = rename.find(x);
        if (it == rename.end()) {
            int id = static_cast<int>(rename.size());
            rename[x] = id;
            x = id;
        } else {
            x = it->second;
        }
    }
    if (!partition_admissible(f.base, block)) return std::nullopt;
    return quotient_expansion(f.base, block);
}

std::string partition_key(const std::vector<int>& block) {
    std::string key;
    for (int b : block) {
        key += std::to_string(b);
        key += ',';
    }
    return key;
}

// Complete coarsening search below one base expansion: find an admissible
// partition whose quotient has no q2 match.  A match survives a coarsening
// unless two distinct nodes of one of its witness paths merge, so branching
// on those pairs is complete.
struct AinjSearch {
    const CrpqUnion& q2_union;
    const EvalOptions& eopts;
    long long budget;
    std::set<std::string> visited;
    bool budget_hit = false;

    std::optional<AinjExpansion> run(const AinjExpansion& f) {
        std::string key = partition_key(f.block_of);
        if (!visited.insert(key).second) return std::nullopt;
        if (--budget < 0) {
            budget_hit = true;
            return std::nullopt;
        }
        GraphDb db = witness_db(f.cq);
        auto matches = find_matches_prepared(q2_union, db, free_nodes(f.cq),
                                             Semantics::AInj, 4, eopts);
        if (matches.empty()) return f;

        // pick the match with the fewest admissible destroy options
        std::vector<std::vector<std::pair<Var, Var>>> options;
        for (const MatchWitness& m : matches) {
            std::set<std::pair<Var, Var>> pairs;
            for (const auto& path : m.atom_paths) destroy_pairs(path, pairs);
            std::vector<std::pair<Var, Var>> adm;
            for (const auto& [a, b] : pairs)
                if (merge_classes(f, a, b)) adm.push_back({a, b});
            options.push_back(std::move(adm));
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < options.size(); ++i)
            if (options[i].size() < options[best].size()) best = i;
        if (options[best].empty()) return std::nullopt;  // unbreakable match

        for (const auto& [a, b] : options[best]) {
            auto merged = merge_classes(f, a, b);
            if (!merged) continue;
            if (auto found = run(*merged)) return found;
            if (budget_hit) return std::nullopt;
        }
        return std::nullopt;
    }
};

} // namespace

ContainmentVerdict find_counterexample_bounded(const Crpq& q1, const Crpq& q2,
                                               Semantics sem, std::size_t max_len,
                                               const ContainOptions& opts) {
    if (max_len < 1) throw domain_error("find_counterexample_bounded: max_len >= 1");
    if (q1.arity() != q2.arity())
        throw domain_error("containment requires equal free-variable arity");
    EvalOptions eopts{opts.step_budget};
    auto lw = longest_word(q1);
    bool exhaustive = lw.has_value() && max_len >= std::max<std::size_t>(*lw, 1);
    const std::string name = "bounded-" + semantics_name(sem);

    if (sem == Semantics::St || sem == Semantics::QInj) {
        ExpansionStream stream(q1, max_len);
        while (auto e = stream.next()) {
            GraphDb db = witness_db(e->cq);
            if (!eval_membership(q2, db, free_nodes(e->cq), sem, eopts))
                return ContainmentVerdict::not_contained(name, trivial_ainj(*e));
        }
        return exhaustive ? ContainmentVerdict::contained(name + "-exhaustive")
                          : ContainmentVerdict::unknown(name, max_len);
    }

    // atom-injective: coarsening descent through identification partitions
    CrpqUnion q2_union = eliminate_epsilon(q2);
    AinjSearch search{q2_union, eopts,
                      opts.partition_budget > 0 ? opts.partition_budget
                                                : default_partition_budget(),
                      {}, false};
    ExpansionStream stream(q1, max_len);
    bool any_budget_hit = false;
    while (auto e = stream.next()) {
        search.visited.clear();
        search.budget_hit = false;
        if (auto found = search.run(trivial_ainj(*e))) {
            // revalidate before returning
            if (!partition_admissible(found->base, found->block_of))
                throw domain_error("internal: inadmissible witness partition");
            if (eval_membership(q2, witness_db(found->cq), free_nodes(found->cq),
                                Semantics::AInj, eopts))
                throw domain_error("internal: witness fails revalidation");
            return ContainmentVerdict::not_contained(name, *found);
        }
        any_budget_hit = any_budget_hit || search.budget_hit;
        if (search.budget < 0) any_budget_hit = true;
    }
    if (exhaustive && !any_budget_hit)
        return ContainmentVerdict::contained(name + "-exhaustive");
    return ContainmentVerdict::unknown(name, max_len);
}

bool contains_cq_cq_ainj(const Crpq& q1, const Crpq& q2) {
    if (classify(q1) != QueryClass::Cq || classify(q2) != QueryClass::Cq)
        throw domain_error("contains_cq_cq_ainj requires two CQs");
    if (q1.arity() != q2.arity())
        throw domain_error("containment requires equal free-variable arity");
    GraphDb db = canonical_db(q1);
    return find_hom(q2, db, free_nodes(q1), HomMode::non_contracting()).has_value();
}

// ---------------------------------------------------------------------------
// Truncated-expansion deciders

namespace {

Symbol fresh_symbol(const Crpq& q1, const Crpq& q2) {
    std::set<Symbol> used(q1.alphabet.begin(), q1.alphabet.end());
    used.insert(q2.alphabet.begin(), q2.alphabet.end());
    Symbol s = "#";
    int i = 0;
    while (used.count(s)) s = "#" + std::to_string(i++);
    return s;
}

// Truncation pairs (u, v), |u| = |v| = N, such that some word u·w·v ∈ L with
// w nonempty.  Enumerated over the atom's own alphabet.
std::vector<std::pair<Word, Word>> truncation_pairs(const Nfa& nfa,
                                                    const std::set<Symbol>& sigma_set,
                                                    std::size_t n) {
    std::vector<Symbol> sigma(sigma_set.begin(), sigma_set.end());
    // reach-in->=1-step relation
    std::vector<std::set<int>> reach1(nfa.n);
    for (int q = 0; q < nfa.n; ++q) {
        std::deque<int> queue;
        for (const auto& [sym, t] : nfa.trans[q])
            if (reach1[q].insert(t).second) queue.push_back(t);
        while (!queue.empty()) {
            int x = queue.front();
            queue.pop_front();
            for (const auto& [sym, t] : nfa.trans[x])
                if (reach1[q].insert(t).second) queue.push_back(t);
        }
    }

    // forward prefixes of length n
    constexpr std::size_t kTruncCap = 200000;
    std::vector<std::pair<Word, std::set<int>>> prefixes{{Word{}, nfa.initial_states()}};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<Word, std::set<int>>> next;
        for (const auto& [w, states] : prefixes)
            for (const Symbol& s : sigma) {
                std::set<int> to = nfa.step(states, s);
                if (to.empty()) continue;
                Word w2 = w;
                w2.push_back(s);
                next.push_back({std::move(w2), std::move(to)});
                if (next.size() > kTruncCap)
                    throw resource_error("truncation prefix enumeration cap exceeded");
            }
        prefixes = std::move(next);
    }
    // backward suffixes of length n: states from which reading v reaches final
    std::vector<std::pair<Word, std::set<int>>> suffixes{{Word{}, {}}};
    {
        std::set<int> fin;
        for (int q = 0; q < nfa.n; ++q)
            if (nfa.final[q]) fin.insert(q);
        suffixes[0].second = fin;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::pair<Word, std::set<int>>> next;
            for (const auto& [w, states] : suffixes)
                for (const Symbol& s : sigma) {
                    std::set<int> from;
                    for (int q = 0; q < nfa.n; ++q)
                        for (const auto& [sym, t] : nfa.trans[q])
                            if (sym == s && states.count(t)) from.insert(q);
                    if (from.empty()) continue;
                    Word w2{s};
                    w2.insert(w2.end(), w.begin(), w.end());
                    next.push_back({std::move(w2), std::move(from)});
                }
            suffixes = std::move(next);
        }
    }
    std::vector<std::pair<Word, Word>> out;
    for (const auto& [u, ustates] : prefixes)
        for (const auto& [v, vstates] : suffixes) {
            bool ok = false;
            for (int q : ustates) {
                for (int t : vstates)
                    if (reach1[q].count(t)) {
                        ok = true;
                        break;
                    }
                if (ok) break;
            }
            if (ok) out.push_back({u, v});
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// One truncated-expansion choice per atom.
struct TruncChoice {
    Word word;            // concrete word (ε allowed) when !truncated
    bool truncated = false;
    Word u, v;            // N-prefix and N-suffix when truncated
};

// connected components of a query's variable graph (free-only vars included)
std::vector<std::vector<Var>> query_components(const Crpq& q) {
    std::vector<Edge> edges;
    for (const Atom& a : q.atoms) edges.push_back({a.src, "c", a.dst});
    GraphDb g(q.vars, edges);
    return connected_components(g);
}

Crpq component_query(const Crpq& q, const std::vector<Var>& comp) {
    std::set<Var> in(comp.begin(), comp.end());
    std::vector<Atom> atoms;
    for (const Atom& a : q.atoms)
        if (in.count(a.src)) atoms.push_back(a);
    std::vector<Var> fv;
    for (const Var& v : q.free_vars)
        if (in.count(v)) fv.push_back(v);
    Crpq c = make_crpq(fv, atoms);
    std::set<Var> all(c.vars.begin(), c.vars.end());
    all.insert(comp.begin(), comp.end());
    c.vars.assign(all.begin(), all.end());
    return c;
}

// anchor for a component: E1#'s free nodes at the component's positions
std::vector<Node> component_anchor(const Crpq& q2, const std::vector<Var>& comp,
                                   const Crpq& e1_cq) {
    std::set<Var> in(comp.begin(), comp.end());
    std::vector<Node> anchor;
    for (std::size_t i = 0; i < q2.free_vars.size(); ++i)
        if (in.count(q2.free_vars[i])) anchor.push_back(e1_cq.free_vars[i]);
    return anchor;
}

// Enumerate the truncated-expansion set S and run `fn` on each element as an
// Expansion of a word-pinned copy of q1; returns true when fn signals stop.
bool for_each_truncated_expansion(
    const Crpq& q1, std::size_t n, const Symbol& fresh,
    const std::function<bool(const Expansion&, const std::vector<TruncChoice>&)>& fn) {
    std::vector<std::vector<TruncChoice>> options(q1.atoms.size());
    for (std::size_t i = 0; i < q1.atoms.size(); ++i) {
        const Atom& a = q1.atoms[i];
        for (Word& w : nfa_words_upto(a.nfa, 2 * n))
            options[i].push_back({std::move(w), false, {}, {}});
        if (n > 0)
            for (auto& [u, v] : truncation_pairs(a.nfa, regex_alphabet(a.lang), n))
                options[i].push_back({{}, true, u, v});
        if (options[i].empty()) return false;  // empty language: no expansions
    }
    std::vector<std::size_t> odo(q1.atoms.size(), 0);
    for (;;) {
        // assemble the pinned query and profile
        std::vector<Atom> atoms;
        ExpansionProfile profile;
        std::vector<TruncChoice> choices;
        for (std::size_t i = 0; i < q1.atoms.size(); ++i) {
            const TruncChoice& c = options[i][odo[i]];
            choices.push_back(c);
            Word w = c.word;
            if (c.truncated) {
                w = c.u;
                w.push_back(fresh);
                w.insert(w.end(), c.v.begin(), c.v.end());
            }
            atoms.push_back(Atom::make(q1.atoms[i].src, q1.atoms[i].dst, re_word(w)));
            profile.words.push_back(std::move(w));
        }
        Crpq pinned = make_crpq(q1.free_vars, std::move(atoms));
        {
            std::set<Var> all(pinned.vars.begin(), pinned.vars.end());
            all.insert(q1.vars.begin(), q1.vars.end());
            pinned.vars.assign(all.begin(), all.end());
        }
        Expansion e = build_expansion(pinned, profile);
        if (fn(e, choices)) return true;

        std::size_t i = 0;
        while (i < odo.size() && ++odo[i] == options[i].size()) odo[i++] = 0;
        if (i == odo.size() || odo.empty()) break;
    }
    return false;
}

// The "maps into a directed path" language of a Boolean star-free component:
// the factor closure of its expansions' rigid path patterns.  A connected CQ
// maps into a directed path iff its variables admit consistent offsets, in
// which case the image reads one fixed pattern word.
std::optional<Nfa> path_pattern_language(const Crpq& component,
                                         const std::vector<Symbol>& sigma) {
    std::vector<Regex> patterns;
    auto lw = longest_word(component);
    if (!lw) return std::nullopt;
    for (const Expansion& e :
         enumerate_expansions(component, std::max<std::size_t>(*lw, 1))) {
        std::map<Var, long> off;
        std::map<long, Symbol> letter;
        bool ok = true;
        GraphDb db = canonical_db(e.cq);
        if (db.nodes().empty()) {
            patterns.push_back(re_eps());
            continue;
        }
        std::deque<Var> queue;
        off[db.nodes()[0]] = 0;
        queue.push_back(db.nodes()[0]);
        auto place = [&](const Var& v, long p) {
            auto it = off.find(v);
            if (it == off.end()) {
                off[v] = p;
                queue.push_back(v);
            } else if (it->second != p) {
                ok = false;
            }
        };
        auto pin = [&](long p, const Symbol& a) {
            auto it = letter.find(p);
            if (it != letter.end() && it->second != a)
                ok = false;
            else
                letter[p] = a;
        };
        while (ok && !queue.empty()) {
            Var x = queue.front();
            queue.pop_front();
            for (const Edge& edge : db.out_edges(x)) {
                pin(off.at(x), edge.label);
                place(edge.dst, off.at(x) + 1);
            }
            for (const Edge& edge : db.in_edges(x)) {
                pin(off.at(x) - 1, edge.label);
                place(edge.src, off.at(x) - 1);
            }
        }
        if (!ok || off.size() != db.nodes().size()) continue;
        Word pattern;
        if (!letter.empty()) {
            long lo = letter.begin()->first, hi = letter.rbegin()->first;
            for (long p = lo; p <= hi; ++p) {
                auto it = letter.find(p);
                if (it == letter.end()) {
                    ok = false;  // disconnected coverage cannot happen when connected
                    break;
                }
                pattern.push_back(it->second);
            }
        }
        if (ok) patterns.push_back(re_word(pattern));
    }
    if (patterns.empty()) return std::nullopt;  // no expansion embeds: language ∅
    return nfa_factor_closure(compile_nfa(re_alt_all(patterns)), sigma);
}

// ∃w, 1 <= |w| <= bound (0 = unbounded), accepted by both automata?
// Breadth-first over determinized state-set pairs with a length layer.
bool joint_word_exists(const Nfa& a, const Nfa& b, std::size_t bound) {
    std::set<Symbol> sigma_set = a.symbols();
    {
        auto s = b.symbols();
        sigma_set.insert(s.begin(), s.end());
    }
    using Pair = std::pair<std::set<int>, std::set<int>>;
    std::set<Pair> seen;
    std::deque<Pair> layer{{a.initial_states(), b.initial_states()}};
    seen.insert(layer.front());
    auto accepting = [&](const Pair& p) {
        bool fa = false, fb = false;
        for (int q : p.first)
            if (a.final[q]) fa = true;
        for (int q : p.second)
            if (b.final[q]) fb = true;
        return fa && fb;
    };
    for (std::size_t len = 1; bound == 0 || len <= bound; ++len) {
        std::deque<Pair> next;
        for (const Pair& p : layer)
            for (const Symbol& s : sigma_set) {
                Pair t{a.step(p.first, s), b.step(p.second, s)};
                if (t.first.empty() || t.second.empty()) continue;
                if (accepting(t)) return true;
                if (seen.insert(t).second) next.push_back(t);
            }
        if (next.empty()) return false;
        layer = std::move(next);
    }
    return false;
}

// Condition (ii), bounded form: some w with |w| <= |states(A_L)|·(N+2),
// u·w·v ∈ L, and the whole path query x -[u w v]-> y contained in the
// Boolean component.
bool escape_word_exists_bounded(const Nfa& lang, const Word& u, const Word& v,
                                const Crpq& component, Semantics sem, std::size_t n,
                                const std::vector<Symbol>& sigma) {
    // Containment of a path query in a CQ component is a factor condition,
    // identical for st and non-contracting homomorphisms (paths are loop-free).
    (void)sem;
    auto pat = path_pattern_language(component, sigma);
    if (!pat) return false;
    std::size_t bound = static_cast<std::size_t>(lang.n) * (n + 2);
    return joint_word_exists(nfa_quotient(lang, u, v), nfa_quotient(*pat, u, v), bound);
}

// Condition (ii), exact form via intersection emptiness of the derived
// language family (standard semantics, star-free right-hand side).
bool escape_word_exists_exact(const Nfa& lang, const Word& u, const Word& v,
                              const Crpq& component, const std::vector<Symbol>& sigma) {
    auto pat = path_pattern_language(component, sigma);
    if (!pat) return false;
    if (sigma.empty()) return false;
    Nfa left = nfa_quotient(lang, u, v);
    Nfa right = nfa_quotient(*pat, u, v);
    std::vector<Regex> rs;
    for (const Symbol& s : sigma) rs.push_back(re_sym(s));
    Nfa nonempty = compile_nfa(re_plus(re_alt_all(rs)));  // w ≠ ε
    return !intersection_emptiness({left, right, nonempty});
}

} // namespace

bool contains_crpq_cq(const Crpq& q1, const Crpq& q2, Semantics sem,
                      const ContainOptions& opts) {
    if (classify(q2) != QueryClass::Cq)
        throw domain_error("contains_crpq_cq requires a CQ right-hand side");
    if (q1.arity() != q2.arity())
        throw domain_error("containment requires equal free-variable arity");
    if (sem == Semantics::QInj)
        return contains_qinj(q1, q2).contained;  // joint injectivity across components

    (void)opts;
    std::size_t n = q2.atoms.size();
    Symbol fresh = fresh_symbol(q1, q2);
    auto components = query_components(q2);
    std::set<Symbol> sigma_set(q1.alphabet.begin(), q1.alphabet.end());
    sigma_set.insert(q2.alphabet.begin(), q2.alphabet.end());
    std::vector<Symbol> sigma(sigma_set.begin(), sigma_set.end());

    bool counterexample = for_each_truncated_expansion(
        q1, n, fresh, [&](const Expansion& e, const std::vector<TruncChoice>& choices) {
            GraphDb db = canonical_db(e.cq);
            for (const auto& comp : components) {
                Crpq comp_q = component_query(q2, comp);
                std::vector<Node> anchor = component_anchor(q2, comp, e.cq);
                // (i) the component must not map near the skeleton
                HomMode mode = sem == Semantics::St ? HomMode::plain()
                                                    : HomMode::non_contracting();
                if (find_hom(comp_q, db, anchor, mode)) continue;
                // (ii) nor inside any truncated atom, for any re-inflation
                if (comp_q.is_boolean()) {
                    bool escape = false;
                    for (std::size_t i = 0; i < choices.size() && !escape; ++i)
                        if (choices[i].truncated)
                            escape = escape_word_exists_bounded(
                                q1.atoms[i].nfa, choices[i].u, choices[i].v, comp_q,
                                sem, n, sigma);
                    if (escape) continue;
                }
                return true;  // counterexample certified by this component
            }
            return false;
        });
    return !counterexample;
}

bool contains_crpq_crpqfin_st(const Crpq& q1, const Crpq& q2,
                              const ContainOptions& opts) {
    if (classify(q2) == QueryClass::Crpq)
        throw domain_error("contains_crpq_crpqfin_st requires a star-free right-hand side");
    if (q1.arity() != q2.arity())
        throw domain_error("containment requires equal free-variable arity");
    (void)opts;

    // N = largest atom count of an expansion of q2
    std::size_t n = 0;
    for (const Atom& a : q2.atoms) n += regex_max_len(a.lang).value();
    Symbol fresh = fresh_symbol(q1, q2);
    auto components = query_components(q2);
    std::set<Symbol> sigma_set(q1.alphabet.begin(), q1.alphabet.end());
    sigma_set.insert(q2.alphabet.begin(), q2.alphabet.end());
    std::vector<Symbol> sigma(sigma_set.begin(), sigma_set.end());

    bool counterexample = for_each_truncated_expansion(
        q1, n, fresh, [&](const Expansion& e, const std::vector<TruncChoice>& choices) {
            GraphDb db = canonical_db(e.cq);
            for (const auto& comp : components) {
                Crpq comp_q = component_query(q2, comp);
                std::vector<Node> anchor = component_anchor(q2, comp, e.cq);
                if (eval_membership(comp_q, db, anchor, Semantics::St)) continue;
                if (comp_q.is_boolean()) {
                    bool escape = false;
                    for (std::size_t i = 0; i < choices.size() && !escape; ++i)
                        if (choices[i].truncated)
                            escape = escape_word_exists_exact(q1.atoms[i].nfa,
                                                              choices[i].u, choices[i].v,
                                                              comp_q, sigma);
                    if (escape) continue;
                }
                return true;
            }
            return false;
        });
    return !counterexample;
}

bool intersection_emptiness(const std::vector<Nfa>& nfas) {
    if (nfas.empty()) throw domain_error("intersection_emptiness: empty sequence");
    std::set<Symbol> sigma_set;
    for (const Nfa& a : nfas) {
        auto s = a.symbols();
        sigma_set.insert(s.begin(), s.end());
    }
    std::vector<Symbol> sigma(sigma_set.begin(), sigma_set.end());

    using State = std::vector<std::set<int>>;  // determinized per automaton
    State start;
    for (const Nfa& a : nfas) start.push_back(a.initial_states());
    auto accepting = [&](const State& s) {
        for (std::size_t i = 0; i < nfas.size(); ++i) {
            bool fin = false;
            for (int q : s[i])
                if (nfas[i].final[q]) fin = true;
            if (!fin) return false;
        }
        return true;
    };
    std::set<State> seen{start};
    std::deque<State> queue{start};
    while (!queue.empty()) {
        State s = queue.front();
        queue.pop_front();
        if (accepting(s)) return false;
        for (const Symbol& a : sigma) {
            State t;
            bool dead = false;
            for (std::size_t i = 0; i < nfas.size(); ++i) {
                t.push_back(nfas[i].step(s[i], a));
                if (t.back().empty()) dead = true;
            }
            if (dead) continue;
            if (seen.insert(t).second) queue.push_back(t);
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Dispatcher

namespace {

bool single_atom_pair(const Crpq& q1, const Crpq& q2, bool& anchored) {
    if (q1.atoms.size() != 1 || q2.atoms.size() != 1) return false;
    const Atom& a1 = q1.atoms[0];
    const Atom& a2 = q2.atoms[0];
    if (a1.src == a1.dst || a2.src == a2.dst) return false;
    if (q1.is_boolean() && q2.is_boolean()) {
        anchored = false;
        return true;
    }
    std::vector<Var> t1{a1.src, a1.dst}, t2{a2.src, a2.dst};
    if (q1.free_vars == t1 && q2.free_vars == t2) {
        anchored = true;
        return true;
    }
    return false;
}

ContainmentVerdict attach_witness(bool contained, const std::string& decider,
                                  const Crpq& q1, const Crpq& q2, Semantics sem,
                                  const ContainOptions& opts) {
    if (contained) return ContainmentVerdict::contained(decider);
    std::size_t len = opts.max_len > 0 ? opts.max_len : default_max_len(q1);
    for (int attempt = 0; attempt < 2; ++attempt) {
        ContainmentVerdict w = find_counterexample_bounded(q1, q2, sem, len, opts);
        if (w.kind == Verdict::NotContained) {
            w.decider = decider;
            return w;
        }
        len *= 2;
    }
    ContainmentVerdict v;
    v.kind = Verdict::NotContained;
    v.decider = decider + " (witness search exhausted its bound)";
    return v;
}

} // namespace

ContainmentVerdict contains(const Crpq& q1, const Crpq& q2, Semantics sem,
                            const ContainOptions& opts, DeciderChoice choice) {
    if (q1.arity() != q2.arity())
        throw domain_error("containment requires equal free-variable arity");
    std::size_t max_len = opts.max_len > 0 ? opts.max_len : default_max_len(q1);
    if (choice == DeciderChoice::Bounded)
        return find_counterexample_bounded(q1, q2, sem, max_len, opts);

    QueryClass c1 = classify(q1);
    QueryClass c2 = classify(q2);

    if (sem == Semantics::QInj) {
        if (c1 == QueryClass::Cq) {
            bool ok = eval_membership(q2, canonical_db(q1), free_nodes(q1),
                                      Semantics::QInj, EvalOptions{opts.step_budget});
            return attach_witness(ok, "qinj-canonical-db", q1, q2, sem, opts);
        }
        QinjResult r = contains_qinj(q1, q2);
        return attach_witness(r.contained, "qinj-abstraction", q1, q2, sem, opts);
    }

    if (sem == Semantics::St) {
        if (c1 == QueryClass::Cq) {
            bool ok = eval_membership(q2, canonical_db(q1), free_nodes(q1),
                                      Semantics::St, EvalOptions{opts.step_budget});
            return attach_witness(ok, "st-canonical-db", q1, q2, sem, opts);
        }
        if (c1 == QueryClass::CrpqFin) {
            std::size_t full = std::max<std::size_t>(longest_word(q1).value(), 1);
            ContainmentVerdict v =
                find_counterexample_bounded(q1, q2, Semantics::St, full, opts);
            v.decider = "st-exhaustion";
            return v;
        }
        if (c2 == QueryClass::Cq)
            return attach_witness(contains_crpq_cq(q1, q2, Semantics::St, opts),
                                  "st-truncation-cq", q1, q2, sem, opts);
        if (c2 == QueryClass::CrpqFin)
            return attach_witness(contains_crpq_crpqfin_st(q1, q2, opts),
                                  "st-truncation-fin", q1, q2, sem, opts);
        bool anchored = false;
        if (single_atom_pair(q1, q2, anchored)) {
            const Nfa& l1 = q1.atoms[0].nfa;
            Nfa l2 = q2.atoms[0].nfa;
            if (!anchored) {
                std::set<Symbol> sig(q1.alphabet.begin(), q1.alphabet.end());
                sig.insert(q2.alphabet.begin(), q2.alphabet.end());
                l2 = nfa_factor_closure(l2, {sig.begin(), sig.end()});
            }
            return attach_witness(nfa_language_subset(l1, l2), "st-single-atom", q1, q2,
                                  sem, opts);
        }
        if (choice == DeciderChoice::Exact)
            throw domain_error(
                "no exact standard-semantics decider for CRPQ/CRPQ with Kleene stars "
                "in this artifact; use --decider bounded");
        return find_counterexample_bounded(q1, q2, sem, max_len, opts);
    }

    // atom-injective
    if (c1 == QueryClass::Cq && c2 == QueryClass::Cq)
        return attach_witness(contains_cq_cq_ainj(q1, q2), "ainj-noncontracting", q1, q2,
                              sem, opts);
    if (c1 != QueryClass::Crpq) {
        std::size_t full = std::max<std::size_t>(longest_word(q1).value(), 1);
        ContainmentVerdict v =
            find_counterexample_bounded(q1, q2, Semantics::AInj, full, opts);
        v.decider = "ainj-exhaustion";
        return v;
    }
    if (c2 == QueryClass::Cq)
        return attach_witness(contains_crpq_cq(q1, q2, Semantics::AInj, opts),
                              "ainj-truncation-cq", q1, q2, sem, opts);
    if (choice == DeciderChoice::Exact)
        throw domain_error(
            "atom-injective containment for star-using CRPQs against CRPQ/CRPQfin "
            "right-hand sides is undecidable (PCP reduction); "
            "use --decider bounded for refutation-only search");
    return find_counterexample_bounded(q1, q2, sem, max_len, opts);
}

std::string render_witness(const AinjExpansion& w) {
    std::ostringstream out;
    out << "witness: " << print_query(w.cq) << "\n";
    for (std::size_t i = 0; i < w.base.profile.words.size(); ++i) {
        out << "  atom " << i << " word:";
        if (w.base.profile.words[i].empty()) out << " eps";
        for (const Symbol& s : w.base.profile.words[i]) out << " " << s;
        out << "\n";
    }
    std::map<Var, std::vector<Var>> blocks;
    for (const auto& [v, c] : w.phi) blocks[c].push_back(v);
    bool any = false;
    for (auto& [c, members] : blocks) {
        if (members.size() < 2) continue;
        std::sort(members.begin(), members.end());
        out << (any ? ", " : "  identified: ");
        any = true;
        out << "{";
        for (std::size_t i = 0; i < members.size(); ++i)
            out << (i ? "=" : "") << members[i];
        out << "}";
    }
    if (any) out << "\n";
    return out.str();
}

} // namespace crpq
