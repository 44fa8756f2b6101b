#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crpq/expansion.hpp"
#include "crpq/nfa.hpp"
#include "crpq/query.hpp"

namespace crpq {

// ---------------------------------------------------------------------------
// Exact query-injective CRPQ/CRPQ containment via abstractions of expansions.
//
// The joint automaton of the right-hand query is the disjoint union of its
// per-atom NFAs, each completed and co-completed over the union alphabet.
// A word's profile records four marker families over joint states q, q':
//
//   FullRun  ⟨q-q'⟩      a run q -> q' reading the whole word
//   Split    ⟨q-|-q'⟩    w = u·v (u,v ≠ ε), q -> final on u, initial -> q' on v
//   SplitGap ⟨q-|··|-q'⟩  w = u·s·v (u,s,v ≠ ε), same two half-runs
//   Infix    ⟨··q-q'··⟩   w = u·s·v (u,s,v ≠ ε), a run q -> q' reading s
//
// An abstraction maps each left-hand atom to the profile of its chosen word;
// a morphism type places the subdivided right-hand query injectively into the
// 3-subdivided left-hand skeleton; compatibility asks for a state labelling
// of the junction nodes satisfying every placement's marker demand.
// ---------------------------------------------------------------------------

// Square bit relation over joint automaton states.
struct Rel {
    int n = 0;
    std::vector<std::uint64_t> bits;

    Rel() = default;
    explicit Rel(int n_) : n(n_), bits((static_cast<std::size_t>(n_) * n_ + 63) / 64, 0) {}
    bool get(int a, int b) const {
        std::size_t i = static_cast<std::size_t>(a) * n + b;
        return (bits[i >> 6] >> (i & 63)) & 1;
    }
    void set(int a, int b) {
        std::size_t i = static_cast<std::size_t>(a) * n + b;
        bits[i >> 6] |= std::uint64_t{1} << (i & 63);
    }
    bool operator==(const Rel& o) const { return n == o.n && bits == o.bits; }
    bool operator<(const Rel& o) const { return bits < o.bits; }
    bool any() const;
};

// Exact marker content of one word.
struct Profile {
    Rel full_run;   // FullRun pairs
    Rel split;      // Split pairs
    Rel split_gap;  // SplitGap pairs
    Rel infix;      // Infix pairs

    bool operator==(const Profile& o) const {
        return full_run == o.full_run && split == o.split && split_gap == o.split_gap &&
               infix == o.infix;
    }
    bool operator<(const Profile& o) const;
};

// Disjoint union of the completed per-atom automata of the right-hand side,
// with registries resolving "initial/final in the automaton it comes from".
struct JointNfa {
    Nfa nfa;
    // per right-hand atom: global state range and initial/final state lists
    struct AtomStates {
        int lo = 0, hi = 0;  // [lo, hi)
        std::vector<int> initials;
        std::vector<int> finals;
    };
    std::vector<AtomStates> atoms;
    std::vector<Symbol> alphabet;  // completion alphabet
};

// q2 must be ε-free (normalize first).  The completion alphabet is the union
// of both queries' alphabets so that partial runs always extend.
JointNfa build_joint_nfa(const Crpq& q2, const std::vector<Symbol>& extra_alphabet = {});

// Single left-to-right scan; |w| >= 1 required.
Profile profile_of_word(const Word& w, const JointNfa& joint);

// Exactly { profile_of_word(w) : w ∈ L(atom_lang) }, by breadth-first
// reachability over the deterministic profile machine times the determinized
// atom automaton.  Throws resource_error past `state_cap` product states.
std::set<Profile> achievable_profiles(const Nfa& atom_lang, const JointNfa& joint,
                                      std::size_t state_cap = 200000);

// One profile per left-hand atom.
using Abstraction = std::vector<Profile>;

// Cartesian product of per-atom achievable profiles, deterministic order.
class AbstractionStream {
public:
    AbstractionStream(const Crpq& q1, const JointNfa& joint, std::size_t state_cap,
                      std::size_t product_cap);
    std::optional<Abstraction> next();
    std::size_t total() const { return total_; }

private:
    std::vector<std::vector<Profile>> per_atom_;
    std::vector<std::size_t> odo_;
    bool exhausted_ = false;
    std::size_t total_ = 0;
};

// A morphism type: injective placement of q2's variables on the subdivided
// skeleton of q1 plus one simple path per q2 atom, internally disjoint and
// edge-disjoint across atoms.  Skeleton nodes are named by q1 variables and
// "A<i>.1"/"A<i>.2" for the two subdivision points of atom i.
struct MorphismType {
    std::map<Var, std::string> var_placement;       // q2 var -> skeleton node
    std::vector<std::vector<std::string>> paths;    // per q2 atom, node sequence
};

std::vector<MorphismType> enumerate_morphism_types(const Crpq& q1, const Crpq& q2);

bool is_compatible(const MorphismType& mt, const Abstraction& abs, const Crpq& q1,
                   const Crpq& q2, const JointNfa& joint);

struct QinjOptions {
    std::size_t profile_state_cap = 200000;
    std::size_t abstraction_cap = 2000000;
    std::size_t disjunct_cap = 0;  // 0 = default
};

struct QinjResult {
    bool contained;
    std::string failing_abstraction;  // diagnostic dump when not contained
};

// Theorem-5.1-style decider: true iff q1 ⊆ q2 under query-injective
// semantics.  Normalizes both sides (ε-elimination, chain merging, duplicate
// atom removal) and rejects queries violating the single-letter duplicate
// restriction with a domain_error diagnostic.
QinjResult contains_qinj(const Crpq& q1, const Crpq& q2, const QinjOptions& opts = {});

} // namespace crpq
