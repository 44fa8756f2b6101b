#include "crpq/expansion.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "crpq/errors.hpp"

namespace crpq {

namespace {

std::string internal_var(std::size_t atom, std::size_t pos) {
    return std::to_string(atom) + "." + std::to_string(pos);
}

struct UnionFind {
    std::map<Var, Var> parent;

    void add(const Var& v) {
        if (!parent.count(v)) parent[v] = v;
    }
    Var find(const Var& v) {
        Var r = v;
        while (parent[r] != r) r = parent[r];
        Var c = v;
        while (parent[c] != r) {
            Var next = parent[c];
            parent[c] = r;
            c = next;
        }
        return r;
    }
    void merge(const Var& a, const Var& b) {
        Var ra = find(a), rb = find(b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
};

} // namespace

std::string Expansion::signature() const {
    std::ostringstream out;
    out << print_query(cq);
    return out.str();
}

Expansion build_expansion(const Crpq& q, const ExpansionProfile& profile) {
    if (profile.words.size() != q.atoms.size())
        throw domain_error("expansion profile must cover every atom");
    for (std::size_t i = 0; i < q.atoms.size(); ++i) {
        const Word& w = profile.words[i];
        if (w.empty()) {
            if (!regex_nullable(q.atoms[i].lang))
                throw domain_error("ε chosen for an atom whose language lacks ε");
        } else if (!q.atoms[i].nfa.accepts(w)) {
            throw domain_error("chosen word is not in the atom language");
        }
    }

    UnionFind uf;
    for (const Var& v : q.vars) uf.add(v);

    struct PreEdge {
        Var src;
        Symbol label;
        Var dst;
    };
    std::vector<std::vector<Var>> atom_path_vars(q.atoms.size());
    std::vector<PreEdge> pre_edges;
    for (std::size_t i = 0; i < q.atoms.size(); ++i) {
        const Atom& a = q.atoms[i];
        const Word& w = profile.words[i];
        if (w.empty()) {
            uf.merge(a.src, a.dst);
            atom_path_vars[i] = {};
            continue;
        }
        std::vector<Var> path{a.src};
        for (std::size_t p = 1; p < w.size(); ++p) {
            Var v = internal_var(i, p);
            if (q.has_var(v))
                throw domain_error("variable name collides with internal scheme: " + v);
            uf.add(v);
            path.push_back(v);
        }
        path.push_back(a.dst);
        for (std::size_t p = 0; p < w.size(); ++p)
            pre_edges.push_back({path[p], w[p], path[p + 1]});
        atom_path_vars[i] = std::move(path);
    }

    Expansion e;
    e.profile = profile;
    for (const auto& [v, _] : uf.parent) e.phi[v] = uf.find(v);

    std::set<std::tuple<Var, Symbol, Var>> edge_set;
    for (const PreEdge& pe : pre_edges)
        edge_set.insert({e.phi.at(pe.src), pe.label, e.phi.at(pe.dst)});
    std::vector<Atom> atoms;
    for (const auto& [s, l, t] : edge_set) atoms.push_back(Atom::make(s, t, re_sym(l)));

    std::vector<Var> free_tuple;
    for (const Var& v : q.free_vars) free_tuple.push_back(e.phi.at(v));
    e.cq = make_crpq(std::move(free_tuple), std::move(atoms));
    // ensure isolated classes (all-ε queries) stay as variables
    {
        std::set<Var> all(e.cq.vars.begin(), e.cq.vars.end());
        for (const auto& [v, c] : e.phi) all.insert(c);
        e.cq.vars.assign(all.begin(), all.end());
    }

    for (std::size_t i = 0; i < q.atoms.size(); ++i) {
        const auto& path = atom_path_vars[i];
        for (std::size_t a = 0; a < path.size(); ++a)
            for (std::size_t b = a + 1; b < path.size(); ++b) {
                Var x = e.phi.at(path[a]), y = e.phi.at(path[b]);
                if (x != y) e.atom_related.insert({std::min(x, y), std::max(x, y)});
            }
    }
    return e;
}

// ---------------------------------------------------------------------------
// Streams

ExpansionStream::ExpansionStream(const Crpq& q, std::size_t max_len)
    : q_(q), max_len_(max_len) {
    constexpr std::size_t kWordCap = 200000;
    words_by_len_.resize(q.atoms.size());
    for (std::size_t i = 0; i < q.atoms.size(); ++i) {
        words_by_len_[i].assign(max_len + 1, {});
        std::vector<Word> words = nfa_words_upto(q.atoms[i].nfa, max_len);
        if (words.size() > kWordCap)
            throw resource_error("expansion stream: per-atom word cap exceeded; "
                                 "lower max_len");
        for (Word& w : words) {
            std::size_t len = w.size();
            words_by_len_[i][len].push_back(std::move(w));
        }
        std::size_t longest = 0;
        bool any = false;
        for (std::size_t l = 0; l <= max_len; ++l)
            if (!words_by_len_[i][l].empty()) {
                longest = l;
                any = true;
            }
        if (!any) {
            exhausted_ = true;  // an atom with no short-enough word: no expansions
            return;
        }
        max_total_ += longest;
    }
}

void ExpansionStream::fill_pending() {
    pending_.clear();
    pending_pos_ = 0;
    if (q_.atoms.empty()) {
        if (total_ == 0) pending_.push_back({});
        return;
    }
    std::vector<const Word*> cur(q_.atoms.size(), nullptr);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t atom,
                                                            std::size_t remaining) {
        if (atom == q_.atoms.size()) {
            if (remaining == 0) pending_.push_back(cur);
            return;
        }
        for (std::size_t len = 0; len <= std::min(remaining, max_len_); ++len) {
            for (const Word& w : words_by_len_[atom][len]) {
                cur[atom] = &w;
                rec(atom + 1, remaining - len);
            }
        }
        cur[atom] = nullptr;
    };
    rec(0, total_);
}

std::optional<Expansion> ExpansionStream::next() {
    while (!exhausted_) {
        if (pending_pos_ >= pending_.size()) {
            if (total_ > max_total_) {
                exhausted_ = true;
                return std::nullopt;
            }
            fill_pending();
            ++total_;
            continue;
        }
        const auto& choice = pending_[pending_pos_++];
        ExpansionProfile profile;
        for (const Word* w : choice) profile.words.push_back(*w);
        Expansion e = build_expansion(q_, profile);
        if (seen_.insert(e.signature()).second) return e;
    }
    return std::nullopt;
}

std::vector<Expansion> enumerate_expansions(const Crpq& q, std::size_t max_len) {
    ExpansionStream stream(q, max_len);
    std::vector<Expansion> out;
    while (auto e = stream.next()) out.push_back(std::move(*e));
    return out;
}

// ---------------------------------------------------------------------------
// a-inj-expansions

bool partition_admissible(const Expansion& base, const std::vector<int>& block_of) {
    const auto& vars = base.cq.vars;
    for (const auto& [a, b] : base.atom_related) {
        std::size_t ia = std::lower_bound(vars.begin(), vars.end(), a) - vars.begin();
        std::size_t ib = std::lower_bound(vars.begin(), vars.end(), b) - vars.begin();
        if (block_of[ia] == block_of[ib]) return false;
    }
    return true;
}

AinjExpansion quotient_expansion(const Expansion& base, std::vector<int> block_of) {
    const auto& vars = base.cq.vars;
    int blocks = block_of.empty() ? 0 : *std::max_element(block_of.begin(), block_of.end()) + 1;
    std::vector<Var> block_name(blocks);
    for (std::size_t i = 0; i < vars.size(); ++i) {
        Var& n = block_name[block_of[i]];
        if (n.empty() || vars[i] < n) n = vars[i];
    }

    AinjExpansion f;
    f.base = base;
    f.block_of = block_of;
    for (std::size_t i = 0; i < vars.size(); ++i) f.phi[vars[i]] = block_name[block_of[i]];

    std::set<std::tuple<Var, Symbol, Var>> edge_set;
    for (const Atom& a : base.cq.atoms) {
        std::vector<Word> ws = nfa_words_upto(a.nfa, 1);
        edge_set.insert({f.phi.at(a.src), ws.at(0).at(0), f.phi.at(a.dst)});
    }
    std::vector<Atom> atoms;
    for (const auto& [s, l, t] : edge_set) atoms.push_back(Atom::make(s, t, re_sym(l)));
    std::vector<Var> free_tuple;
    for (const Var& v : base.cq.free_vars) free_tuple.push_back(f.phi.at(v));
    f.cq = make_crpq(std::move(free_tuple), std::move(atoms));
    {
        std::set<Var> all(f.cq.vars.begin(), f.cq.vars.end());
        for (const Var& n : block_name) all.insert(n);
        f.cq.vars.assign(all.begin(), all.end());
    }

    for (const auto& [a, b] : base.atom_related) {
        Var x = f.phi.at(a), y = f.phi.at(b);
        if (x != y) f.atom_related.insert({std::min(x, y), std::max(x, y)});
    }
    return f;
}

AinjExpansion trivial_ainj(const Expansion& base) {
    std::vector<int> block_of(base.cq.vars.size());
    for (std::size_t i = 0; i < block_of.size(); ++i) block_of[i] = static_cast<int>(i);
    return quotient_expansion(base, std::move(block_of));
}

bool AinjExpansion::is_trivial() const {
    for (std::size_t i = 0; i < block_of.size(); ++i)
        if (block_of[i] != static_cast<int>(i)) return false;
    return true;
}

std::string AinjExpansion::signature() const {
    std::ostringstream out;
    out << base.signature() << " | ";
    for (int b : block_of) out << b << ",";
    return out.str();
}

namespace {

// All admissible partitions of the base variables as restricted growth strings.
std::vector<std::vector<int>> admissible_partitions(const Expansion& base) {
    const auto& vars = base.cq.vars;
    std::size_t n = vars.size();
    std::map<Var, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[vars[i]] = i;
    std::vector<std::vector<char>> conflict(n, std::vector<char>(n, 0));
    for (const auto& [a, b] : base.atom_related) {
        std::size_t ia = index.at(a), ib = index.at(b);
        conflict[ia][ib] = conflict[ib][ia] = 1;
    }

    std::vector<std::vector<int>> out;
    std::vector<int> block_of(n, -1);
    std::vector<std::vector<std::size_t>> members;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == n) {
            out.push_back(block_of);
            return;
        }
        for (std::size_t b = 0; b <= members.size(); ++b) {
            if (b < members.size()) {
                bool ok = true;
                for (std::size_t m : members[b])
                    if (conflict[i][m]) {
                        ok = false;
                        break;
                    }
                if (!ok) continue;
                members[b].push_back(i);
                block_of[i] = static_cast<int>(b);
                rec(i + 1);
                members[b].pop_back();
            } else {
                members.push_back({i});
                block_of[i] = static_cast<int>(b);
                rec(i + 1);
                members.pop_back();
            }
        }
        block_of[i] = -1;
    };
    rec(0);
    return out;
}

} // namespace

AinjExpansionStream::AinjExpansionStream(const Crpq& q, std::size_t max_len)
    : bases_(q, max_len) {
    advance_base();
}

void AinjExpansionStream::advance_base() {
    cur_ = bases_.next();
    partitions_.clear();
    pos_ = 0;
    if (cur_) partitions_ = admissible_partitions(*cur_);
}

std::optional<AinjExpansion> AinjExpansionStream::next() {
    while (cur_) {
        if (pos_ < partitions_.size())
            return quotient_expansion(*cur_, partitions_[pos_++]);
        advance_base();
    }
    return std::nullopt;
}

std::vector<AinjExpansion> enumerate_ainj_expansions(const Crpq& q, std::size_t max_len) {
    AinjExpansionStream stream(q, max_len);
    std::vector<AinjExpansion> out;
    while (auto f = stream.next()) out.push_back(std::move(*f));
    return out;
}

} // namespace crpq
