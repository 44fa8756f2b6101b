#include "crpq/graph.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "crpq/errors.hpp"

namespace crpq {

GraphDb::GraphDb(std::vector<Node> nodes, std::vector<Edge> edges,
                 std::vector<Symbol> extra_alphabet) {
    std::set<Node> ns(nodes.begin(), nodes.end());
    std::set<Edge> es(edges.begin(), edges.end());
    std::set<Symbol> as(extra_alphabet.begin(), extra_alphabet.end());
    for (const Edge& e : es) {
        ns.insert(e.src);
        ns.insert(e.dst);
        as.insert(e.label);
    }
    nodes_.assign(ns.begin(), ns.end());
    edges_.assign(es.begin(), es.end());
    alphabet_.assign(as.begin(), as.end());
    for (const Edge& e : edges_) {
        out_[e.src].push_back(e);
        in_[e.dst].push_back(e);
    }
}

bool GraphDb::has_node(const Node& v) const {
    return std::binary_search(nodes_.begin(), nodes_.end(), v);
}

bool GraphDb::has_edge(const Node& u, const Symbol& a, const Node& v) const {
    return std::binary_search(edges_.begin(), edges_.end(), Edge{u, a, v});
}

const std::vector<Edge>& GraphDb::out_edges(const Node& u) const {
    static const std::vector<Edge> empty;
    auto it = out_.find(u);
    return it == out_.end() ? empty : it->second;
}

const std::vector<Edge>& GraphDb::in_edges(const Node& u) const {
    static const std::vector<Edge> empty;
    auto it = in_.find(u);
    return it == in_.end() ? empty : it->second;
}

bool path_is_chained(const Path& p) {
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (p[i].dst != p[i + 1].src) return false;
    return true;
}

Word path_label(const Path& p) {
    Word w;
    w.reserve(p.size());
    for (const Edge& e : p) w.push_back(e.label);
    return w;
}

std::optional<Node> path_source(const Path& p) {
    if (p.empty()) return std::nullopt;
    return p.front().src;
}

std::optional<Node> path_target(const Path& p) {
    if (p.empty()) return std::nullopt;
    return p.back().dst;
}

static void require_chained(const Path& p) {
    if (!path_is_chained(p)) throw domain_error("malformed path: edges do not chain");
}

bool is_simple_path(const Path& p) {
    require_chained(p);
    if (p.empty()) return true;
    std::set<Node> seen{p.front().src};
    for (const Edge& e : p)
        if (!seen.insert(e.dst).second) return false;
    return true;
}

bool is_simple_cycle(const Path& p) {
    require_chained(p);
    if (p.empty()) throw domain_error("a cycle has length >= 1");
    if (p.front().src != p.back().dst) return false;
    std::set<Node> seen;
    seen.insert(p.front().src);
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (!seen.insert(p[i].dst).second) return false;
    return true;
}

std::vector<std::vector<Node>> connected_components(const GraphDb& g) {
    std::map<Node, Node> parent;
    for (const Node& v : g.nodes()) parent[v] = v;
    std::function<Node(const Node&)> find = [&](const Node& v) -> Node {
        Node r = v;
        while (parent[r] != r) r = parent[r];
        Node c = v;
        while (parent[c] != r) {
            Node next = parent[c];
            parent[c] = r;
            c = next;
        }
        return r;
    };
    for (const Edge& e : g.edges()) {
        Node a = find(e.src), b = find(e.dst);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::map<Node, std::vector<Node>> blocks;
    for (const Node& v : g.nodes()) blocks[find(v)].push_back(v);
    std::vector<std::vector<Node>> result;
    for (auto& [root, members] : blocks) {
        std::sort(members.begin(), members.end());
        result.push_back(members);
    }
    std::sort(result.begin(), result.end());
    return result;
}

GraphDb parse_graph(const std::string& text) {
    std::vector<Edge> edges;
    std::vector<Node> nodes;
    std::istringstream in(text);
    std::string line;
    std::size_t offset = 0;
    while (std::getline(in, line)) {
        std::size_t line_start = offset;
        offset += line.size() + 1;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first[0] == '#') continue;
        std::string label, target, extra;
        if (!(ls >> label >> target))
            throw parse_error("graph line needs 'source label target'", line_start);
        if (ls >> extra)
            throw parse_error("trailing token '" + extra + "' on graph line", line_start);
        edges.push_back(Edge{first, label, target});
    }
    return GraphDb(std::move(nodes), std::move(edges));
}

std::string print_graph(const GraphDb& g) {
    std::ostringstream out;
    for (const Edge& e : g.edges()) out << e.src << " " << e.label << " " << e.dst << "\n";
    return out.str();
}

} // namespace crpq
