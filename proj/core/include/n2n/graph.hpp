#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace n2n {

using NodeId = std::uint32_t;

/// Immutable undirected graph in CSR form. Each undirected edge is stored in
/// both directions; neighbour lists are strictly ascending, without self-loops
/// or duplicates. Shareable across threads once constructed.
class Graph {
public:
    struct EdgeListStats {
        std::size_t self_loops_dropped = 0;
        std::size_t duplicates_merged = 0;
    };

    Graph() = default;

    /// Raw CSR constructor. Performs no validation; see validate_graph.
    Graph(std::size_t n_nodes, std::vector<std::size_t> offsets, std::vector<NodeId> neighbours,
          std::size_t n_undirected_edges)
        : n_nodes_(n_nodes),
          offsets_(std::move(offsets)),
          neighbours_(std::move(neighbours)),
          n_undirected_edges_(n_undirected_edges) {}

    /// Normalizing constructor: dedups edges listed in either or both
    /// directions, drops self-loops (counted in stats).
    static Graph from_edges(std::size_t n_nodes, std::vector<std::pair<NodeId, NodeId>> edges,
                            EdgeListStats* stats = nullptr);

    std::size_t num_nodes() const { return n_nodes_; }
    std::size_t num_undirected_edges() const { return n_undirected_edges_; }

    std::span<const NodeId> neighbours(NodeId i) const {
        return {neighbours_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    std::size_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
    bool adjacent(NodeId i, NodeId j) const;

    const std::vector<std::size_t>& offsets() const { return offsets_; }
    const std::vector<NodeId>& adjacency() const { return neighbours_; }

    double mean_degree() const {
        return n_nodes_ == 0 ? 0.0 : static_cast<double>(neighbours_.size()) / static_cast<double>(n_nodes_);
    }

private:
    std::size_t n_nodes_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> neighbours_;
    std::size_t n_undirected_edges_ = 0;
};

/// neighbours(i) ∪ {i}, ascending. Throws std::out_of_range for bad i.
std::vector<NodeId> closed_neighbourhood(const Graph& g, NodeId i);

struct ValidationReport {
    bool ok = true;
    std::string violation;  // first violated invariant, empty when ok

    explicit operator bool() const { return ok; }
};

/// Checks every Graph invariant; the report names the first violation found.
ValidationReport validate_graph(const Graph& g);

}  // namespace n2n
