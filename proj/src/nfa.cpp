#include "crpq/nfa.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <queue>

#include "crpq/errors.hpp"

namespace crpq {

std::set<int> Nfa::initial_states() const {
    std::set<int> s;
    for (int q = 0; q < n; ++q)
        if (initial[q]) s.insert(q);
    return s;
}

std::set<int> Nfa::final_states() const {
    std::set<int> s;
    for (int q = 0; q < n; ++q)
        if (final[q]) s.insert(q);
    return s;
}

std::set<int> Nfa::step(const std::set<int>& from, const Symbol& a) const {
    std::set<int> out;
    for (int q : from)
        for (const auto& [sym, t] : trans[q])
            if (sym == a) out.insert(t);
    return out;
}

bool Nfa::accepts(const Word& w) const {
    std::set<int> cur = initial_states();
    for (const Symbol& a : w) {
        cur = step(cur, a);
        if (cur.empty()) return false;
    }
    for (int q : cur)
        if (final[q]) return true;
    return false;
}

bool Nfa::accepts_epsilon() const {
    for (int q = 0; q < n; ++q)
        if (initial[q] && final[q]) return true;
    return false;
}

std::set<Symbol> Nfa::symbols() const {
    std::set<Symbol> out;
    for (int q = 0; q < n; ++q)
        for (const auto& [sym, t] : trans[q]) out.insert(sym);
    return out;
}

// ---------------------------------------------------------------------------
// Glushkov construction

namespace {

struct GlushkovInfo {
    bool nullable;
    std::set<int> first, last;
};

// positions are numbered in symbol order of a left-to-right AST walk
void collect_positions(const Regex& r, std::vector<Symbol>& syms) {
    if (!r) return;
    if (r->kind == RegexKind::Symbol) {
        syms.push_back(r->symbol);
        return;
    }
    collect_positions(r->left, syms);
    collect_positions(r->right, syms);
}

GlushkovInfo glushkov(const Regex& r, int& next_pos,
                      std::vector<std::set<int>>& follow) {
    GlushkovInfo info;
    switch (r->kind) {
        case RegexKind::Empty:
            info.nullable = false;
            break;
        case RegexKind::Epsilon:
            info.nullable = true;
            break;
        case RegexKind::Symbol: {
            int p = next_pos++;
            info.nullable = false;
            info.first = {p};
            info.last = {p};
            break;
        }
        case RegexKind::Concat: {
            GlushkovInfo a = glushkov(r->left, next_pos, follow);
            GlushkovInfo b = glushkov(r->right, next_pos, follow);
            for (int p : a.last)
                for (int q : b.first) follow[p].insert(q);
            info.nullable = a.nullable && b.nullable;
            info.first = a.first;
            if (a.nullable) info.first.insert(b.first.begin(), b.first.end());
            info.last = b.last;
            if (b.nullable) info.last.insert(a.last.begin(), a.last.end());
            break;
        }
        case RegexKind::Union: {
            GlushkovInfo a = glushkov(r->left, next_pos, follow);
            GlushkovInfo b = glushkov(r->right, next_pos, follow);
            info.nullable = a.nullable || b.nullable;
            info.first = a.first;
            info.first.insert(b.first.begin(), b.first.end());
            info.last = a.last;
            info.last.insert(b.last.begin(), b.last.end());
            break;
        }
        case RegexKind::Star:
        case RegexKind::Plus: {
            GlushkovInfo a = glushkov(r->left, next_pos, follow);
            for (int p : a.last)
                for (int q : a.first) follow[p].insert(q);
            info.nullable = r->kind == RegexKind::Star ? true : a.nullable;
            info.first = a.first;
            info.last = a.last;
            break;
        }
    }
    return info;
}

} // namespace

Nfa compile_nfa(const Regex& r) {
    std::vector<Symbol> syms;
    collect_positions(r, syms);
    int m = static_cast<int>(syms.size());
    std::vector<std::set<int>> follow(m);
    int next_pos = 0;
    GlushkovInfo info = glushkov(r, next_pos, follow);

    Nfa a;
    a.n = m + 1;  // state 0 = start, states 1..m = positions shifted by one
    a.initial.assign(a.n, 0);
    a.final.assign(a.n, 0);
    a.trans.assign(a.n, {});
    a.initial[0] = 1;
    if (info.nullable) a.final[0] = 1;
    for (int p : info.first) a.trans[0].push_back({syms[p], p + 1});
    for (int p = 0; p < m; ++p)
        for (int q : follow[p]) a.trans[p + 1].push_back({syms[q], q + 1});
    for (int p : info.last) a.final[p + 1] = 1;
    for (auto& t : a.trans) {
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
    }
    return a;
}

Nfa complete_cocomplete(const Nfa& a, const std::vector<Symbol>& alphabet) {
    Nfa b = a;
    std::vector<std::map<Symbol, bool>> has_out(a.n), has_in(a.n);
    for (int q = 0; q < a.n; ++q)
        for (const auto& [sym, t] : a.trans[q]) {
            has_out[q][sym] = true;
            has_in[t][sym] = true;
        }

    bool need_sink = false, need_source = false;
    for (int q = 0; q < a.n; ++q)
        for (const Symbol& s : alphabet) {
            if (!has_out[q][s]) need_sink = true;
            if (!has_in[q][s]) need_source = true;
        }
    if (a.n == 0) need_sink = need_source = true;

    int sink = -1, source = -1;
    if (need_sink) {
        sink = b.n++;
        b.initial.push_back(0);
        b.final.push_back(0);
        b.trans.emplace_back();
    }
    if (need_source) {
        source = b.n++;
        b.initial.push_back(0);
        b.final.push_back(0);
        b.trans.emplace_back();
    }
    if (need_sink) {
        for (int q = 0; q < a.n; ++q)
            for (const Symbol& s : alphabet)
                if (!has_out[q][s]) b.trans[q].push_back({s, sink});
        for (const Symbol& s : alphabet) b.trans[sink].push_back({s, sink});
    }
    if (need_source) {
        for (int q = 0; q < a.n; ++q)
            for (const Symbol& s : alphabet)
                if (!has_in[q][s]) b.trans[source].push_back({s, q});
        for (const Symbol& s : alphabet) b.trans[source].push_back({s, source});
        if (need_sink)
            ; // sink already has self-loop incoming; source->sink not needed
    }
    for (auto& t : b.trans) {
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
    }
    return b;
}

bool nfa_language_nonempty(const Nfa& a) {
    std::vector<char> seen(a.n, 0);
    std::deque<int> queue;
    for (int q = 0; q < a.n; ++q)
        if (a.initial[q]) {
            seen[q] = 1;
            queue.push_back(q);
        }
    while (!queue.empty()) {
        int q = queue.front();
        queue.pop_front();
        if (a.final[q]) return true;
        for (const auto& [sym, t] : a.trans[q])
            if (!seen[t]) {
                seen[t] = 1;
                queue.push_back(t);
            }
    }
    return false;
}

std::vector<char> nfa_coreachable(const Nfa& a) {
    std::vector<std::vector<int>> rev(a.n);
    for (int q = 0; q < a.n; ++q)
        for (const auto& [sym, t] : a.trans[q]) rev[t].push_back(q);
    std::vector<char> co(a.n, 0);
    std::deque<int> queue;
    for (int q = 0; q < a.n; ++q)
        if (a.final[q]) {
            co[q] = 1;
            queue.push_back(q);
        }
    while (!queue.empty()) {
        int q = queue.front();
        queue.pop_front();
        for (int p : rev[q])
            if (!co[p]) {
                co[p] = 1;
                queue.push_back(p);
            }
    }
    return co;
}

std::vector<Word> nfa_words_upto(const Nfa& a, std::size_t max_len) {
    std::vector<Word> out;
    std::vector<char> co = nfa_coreachable(a);
    std::set<Symbol> sigma_set = a.symbols();
    std::vector<Symbol> sigma(sigma_set.begin(), sigma_set.end());

    struct Item {
        Word w;
        std::set<int> states;
    };
    std::vector<Item> layer{{Word{}, a.initial_states()}};
    auto is_accepting = [&](const std::set<int>& s) {
        for (int q : s)
            if (a.final[q]) return true;
        return false;
    };
    auto prune = [&](std::set<int> s) {
        std::set<int> alive;
        for (int q : s)
            if (co[q]) alive.insert(q);
        return alive;
    };
    layer[0].states = prune(layer[0].states);
    if (is_accepting(layer[0].states)) out.push_back({});
    constexpr std::size_t kWordEnumCap = 1000000;
    for (std::size_t len = 1; len <= max_len && !layer.empty(); ++len) {
        std::vector<Item> next;
        for (const Item& it : layer) {
            for (const Symbol& s : sigma) {
                std::set<int> to = prune(a.step(it.states, s));
                if (to.empty()) continue;
                Word w = it.w;
                w.push_back(s);
                if (is_accepting(to)) out.push_back(w);
                next.push_back({std::move(w), std::move(to)});
                if (next.size() > kWordEnumCap || out.size() > kWordEnumCap)
                    throw resource_error("word enumeration cap exceeded");
            }
        }
        layer = std::move(next);
    }
    return out;
}

Nfa nfa_quotient(const Nfa& a, const Word& u, const Word& v) {
    Nfa b = a;
    std::set<int> start = a.initial_states();
    for (const Symbol& s : u) start = a.step(start, s);
    b.initial.assign(a.n, 0);
    for (int q : start) b.initial[q] = 1;

    // states from which reading v can reach a final state
    std::vector<char> good(a.n, 0);
    for (int q = 0; q < a.n; ++q) {
        std::set<int> cur{q};
        for (const Symbol& s : v) cur = a.step(cur, s);
        for (int t : cur)
            if (a.final[t]) {
                good[q] = 1;
                break;
            }
    }
    b.final = good;
    return b;
}

Nfa nfa_factor_closure(const Nfa& a, const std::vector<Symbol>& alphabet) {
    Nfa b = a;
    int pre = b.n++;
    int post = b.n++;
    b.initial.assign(b.n, 0);
    b.final.push_back(0);
    b.final.push_back(0);
    b.trans.emplace_back();
    b.trans.emplace_back();

    b.initial[pre] = 1;
    b.final[post] = 1;
    for (const Symbol& s : alphabet) {
        b.trans[pre].push_back({s, pre});
        b.trans[post].push_back({s, post});
    }
    // pre -> (initial states' outgoing edges): enter L after any padding
    for (int q = 0; q < a.n; ++q)
        if (a.initial[q])
            for (const auto& [sym, t] : a.trans[q]) b.trans[pre].push_back({sym, t});
    // final states exit into post on any letter: padding after L
    for (int q = 0; q < a.n; ++q)
        if (a.final[q])
            for (const Symbol& s : alphabet) b.trans[q].push_back({s, post});
    // ε ∈ L makes the closure all of Σ*
    if (a.accepts_epsilon()) b.final[pre] = 1;

    for (auto& t : b.trans) {
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
    }
    return b;
}

bool nfa_language_subset(const Nfa& a, const Nfa& b, std::size_t subset_cap) {
    // Product of a with the determinized complement of b, on the fly.
    std::set<Symbol> sigma_set = a.symbols();
    {
        auto bs = b.symbols();
        sigma_set.insert(bs.begin(), bs.end());
    }
    std::vector<Symbol> sigma(sigma_set.begin(), sigma_set.end());

    using BSet = std::set<int>;
    std::map<std::pair<int, BSet>, bool> seen;
    std::deque<std::pair<int, BSet>> queue;
    BSet b0 = b.initial_states();
    auto b_accepts = [&](const BSet& s) {
        for (int q : s)
            if (b.final[q]) return true;
        return false;
    };
    for (int q = 0; q < a.n; ++q)
        if (a.initial[q]) {
            if (a.final[q] && !b_accepts(b0)) return false;
            auto key = std::make_pair(q, b0);
            if (!seen.count(key)) {
                seen[key] = true;
                queue.push_back(key);
            }
        }
    while (!queue.empty()) {
        auto [q, bs] = queue.front();
        queue.pop_front();
        if (seen.size() > subset_cap)
            throw resource_error("nfa_language_subset: product state cap exceeded");
        for (const Symbol& s : sigma) {
            BSet bt = b.step(bs, s);
            for (const auto& [sym, t] : a.trans[q]) {
                if (sym != s) continue;
                if (a.final[t] && !b_accepts(bt)) return false;
                auto key = std::make_pair(t, bt);
                if (!seen.count(key)) {
                    seen[key] = true;
                    queue.push_back(key);
                }
            }
        }
    }
    return true;
}

} // namespace crpq
