#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crpq/graph.hpp"
#include "crpq/query.hpp"

namespace crpq {

using Mapping = std::map<Var, Node>;

enum class HomModeKind { Plain, Injective, AtomInjective, NonContracting };

struct HomMode {
    HomModeKind kind = HomModeKind::Plain;
    // AtomInjective: pairs of variables that must map to distinct nodes.
    std::vector<std::pair<Var, Var>> distinct_pairs;

    static HomMode plain() { return {HomModeKind::Plain, {}}; }
    static HomMode injective() { return {HomModeKind::Injective, {}}; }
    static HomMode atom_injective(std::vector<std::pair<Var, Var>> pairs) {
        return {HomModeKind::AtomInjective, std::move(pairs)};
    }
    static HomMode non_contracting() { return {HomModeKind::NonContracting, {}}; }
};

// Complete backtracking search for a homomorphism from a CQ to a graph.
// `anchor`, when present, pins the free-variable tuple position-wise.
// Most-constrained-variable-first ordering; ties broken lexicographically.
// Throws domain_error when `source` is not a CQ or anchor arity mismatches.
std::optional<Mapping> find_hom(const Crpq& source, const GraphDb& target,
                                const std::optional<std::vector<Node>>& anchor,
                                const HomMode& mode);

// True iff no atom with distinct endpoints collapses under m.
bool is_non_contracting(const Mapping& m, const Crpq& source);

} // namespace crpq
