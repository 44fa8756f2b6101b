#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace crpq {

using Node = std::string;
using Symbol = std::string;
using Word = std::vector<Symbol>;

struct Edge {
    Node src;
    Symbol label;
    Node dst;

    friend bool operator==(const Edge& a, const Edge& b) {
        return a.src == b.src && a.label == b.label && a.dst == b.dst;
    }
    friend bool operator<(const Edge& a, const Edge& b) {
        if (a.src != b.src) return a.src < b.src;
        if (a.label != b.label) return a.label < b.label;
        return a.dst < b.dst;
    }
};

// Finite edge-labeled directed multigraph with set semantics on edge triples.
// Immutable once constructed; node order is lexicographic everywhere.
class GraphDb {
public:
    GraphDb() = default;
    GraphDb(std::vector<Node> nodes, std::vector<Edge> edges,
            std::vector<Symbol> extra_alphabet = {});

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Symbol>& alphabet() const { return alphabet_; }

    bool has_node(const Node& v) const;
    bool has_edge(const Node& u, const Symbol& a, const Node& v) const;
    const std::vector<Edge>& out_edges(const Node& u) const;
    const std::vector<Edge>& in_edges(const Node& u) const;

private:
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<Symbol> alphabet_;
    std::map<Node, std::vector<Edge>> out_;
    std::map<Node, std::vector<Edge>> in_;
};

// A path is a chained sequence of edges; the empty sequence is the ε-path.
using Path = std::vector<Edge>;

bool path_is_chained(const Path& p);
Word path_label(const Path& p);
std::optional<Node> path_source(const Path& p);
std::optional<Node> path_target(const Path& p);

// All visited nodes pairwise distinct. Throws domain_error on non-chaining edges.
bool is_simple_path(const Path& p);

// First node equals last, all earlier nodes pairwise distinct.
// Throws domain_error on empty or non-chaining input (a cycle has length >= 1).
bool is_simple_cycle(const Path& p);

// Partition of the node set under undirected reachability.
// Blocks and their members are sorted lexicographically.
std::vector<std::vector<Node>> connected_components(const GraphDb& g);

// Text format: one edge per line, "source label target"; '#' lines ignored.
GraphDb parse_graph(const std::string& text);
std::string print_graph(const GraphDb& g);

} // namespace crpq
