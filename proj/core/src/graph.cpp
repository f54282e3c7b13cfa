#include "n2n/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace n2n {

Graph Graph::from_edges(std::size_t n_nodes, std::vector<std::pair<NodeId, NodeId>> edges,
                        EdgeListStats* stats) {
    EdgeListStats local;
    // Normalize to (min, max) so "0 1" and "1 0" collapse to one edge.
    std::vector<std::pair<NodeId, NodeId>> norm;
    norm.reserve(edges.size());
    for (auto [a, b] : edges) {
        if (a >= n_nodes || b >= n_nodes) {
            throw std::out_of_range("from_edges: node id " + std::to_string(std::max(a, b)) +
                                    " >= n_nodes " + std::to_string(n_nodes));
        }
        if (a == b) {
            ++local.self_loops_dropped;
            continue;
        }
        if (a > b) std::swap(a, b);
        norm.emplace_back(a, b);
    }
    std::sort(norm.begin(), norm.end());
    const auto last = std::unique(norm.begin(), norm.end());
    local.duplicates_merged = static_cast<std::size_t>(norm.end() - last);
    norm.erase(last, norm.end());

    std::vector<std::size_t> offsets(n_nodes + 1, 0);
    for (const auto& [a, b] : norm) {
        ++offsets[a + 1];
        ++offsets[b + 1];
    }
    for (std::size_t i = 0; i < n_nodes; ++i) offsets[i + 1] += offsets[i];

    std::vector<NodeId> neighbours(norm.size() * 2);
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& [a, b] : norm) {
        neighbours[cursor[a]++] = b;
        neighbours[cursor[b]++] = a;
    }
    for (std::size_t i = 0; i < n_nodes; ++i) {
        std::sort(neighbours.begin() + static_cast<std::ptrdiff_t>(offsets[i]),
                  neighbours.begin() + static_cast<std::ptrdiff_t>(offsets[i + 1]));
    }

    if (stats) *stats = local;
    return Graph(n_nodes, std::move(offsets), std::move(neighbours), norm.size());
}

bool Graph::adjacent(NodeId i, NodeId j) const {
    const auto ns = neighbours(i);
    return std::binary_search(ns.begin(), ns.end(), j);
}

std::vector<NodeId> closed_neighbourhood(const Graph& g, NodeId i) {
    if (i >= g.num_nodes()) {
        throw std::out_of_range("closed_neighbourhood: node id " + std::to_string(i) +
                                " >= n_nodes " + std::to_string(g.num_nodes()));
    }
    const auto ns = g.neighbours(i);
    std::vector<NodeId> out;
    out.reserve(ns.size() + 1);
    bool inserted = false;
    for (const NodeId j : ns) {
        if (!inserted && j > i) {
            out.push_back(i);
            inserted = true;
        }
        out.push_back(j);
    }
    if (!inserted) out.push_back(i);
    return out;
}

ValidationReport validate_graph(const Graph& g) {
    const auto& offsets = g.offsets();
    const auto& adj = g.adjacency();
    const std::size_t n = g.num_nodes();

    auto fail = [](std::string msg) { return ValidationReport{false, std::move(msg)}; };

    if (offsets.size() != n + 1) return fail("offsets length != n_nodes+1");
    if (offsets.front() != 0) return fail("offsets[0] != 0");
    for (std::size_t i = 0; i < n; ++i) {
        if (offsets[i + 1] < offsets[i]) {
            return fail("offsets decreasing at node " + std::to_string(i));
        }
    }
    if (offsets.back() != adj.size()) return fail("offsets[n] != total directed entries");
    if (adj.size() != 2 * g.num_undirected_edges()) {
        return fail("directed entry count != 2*|E|");
    }

    for (std::size_t i = 0; i < n; ++i) {
        const auto ns = g.neighbours(static_cast<NodeId>(i));
        for (std::size_t k = 0; k < ns.size(); ++k) {
            if (ns[k] >= n) {
                return fail("neighbour id out of range at node " + std::to_string(i));
            }
            if (ns[k] == i) return fail("self-loop at node " + std::to_string(i));
            if (k > 0 && ns[k] <= ns[k - 1]) {
                return fail("unsorted neighbour list at node " + std::to_string(i) +
                            (ns[k] == ns[k - 1] ? " (duplicate entry)" : ""));
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (const NodeId j : g.neighbours(static_cast<NodeId>(i))) {
            if (!g.adjacent(j, static_cast<NodeId>(i))) {
                return fail("asymmetric adjacency: " + std::to_string(i) + " -> " +
                            std::to_string(j) + " has no reverse entry");
            }
        }
    }
    return {};
}

}  // namespace n2n
