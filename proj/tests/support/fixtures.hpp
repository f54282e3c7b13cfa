#pragma once

// Shared test fixtures: tiny named graphs, a seeded Erdos-Renyi generator and
// a brute-force reference for the structural dependency score. The reference
// deliberately avoids the library's sorted-intersection path: it classifies
// every node by direct adjacency queries and evaluates the mutual-information
// sum from the raw 2x2 counts.

#include <cmath>
#include <utility>
#include <vector>

#include "n2n/graph.hpp"
#include "n2n/rng.hpp"
#include "n2n/taps.hpp"

namespace n2n::testing {

inline Graph path_graph(std::size_t n) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return Graph::from_edges(n, std::move(edges));
}

inline Graph triangle() { return Graph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}}); }

/// Star with `leaves` leaves; node 0 is the centre.
inline Graph star(std::size_t leaves) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
    return Graph::from_edges(leaves + 1, std::move(edges));
}

/// K_{2,2}: nodes {0,1} on one side, {2,3} on the other.
inline Graph complete_bipartite_22() {
    return Graph::from_edges(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}});
}

inline Graph er_graph(std::size_t n, double p, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) {
            if (rng.uniform01() < p) edges.emplace_back(i, j);
        }
    }
    return Graph::from_edges(n, std::move(edges));
}

/// Membership of `v` in the neighbourhood variable of `u`.
inline bool in_neighbourhood(const Graph& g, NodeId u, NodeId v, NeighbourhoodConvention c) {
    if (c == NeighbourhoodConvention::Closed && u == v) return true;
    return g.adjacent(u, v);
}

/// Brute-force structural dependency: enumerate all nodes into the four
/// joint cells and sum p*ln(p/(px*py)) over the nonzero ones.
inline double dependency_oracle(const Graph& g, NodeId i, NodeId j,
                                NeighbourhoodConvention c = NeighbourhoodConvention::Closed) {
    const double n = static_cast<double>(g.num_nodes());
    double cells[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        const bool in_i = in_neighbourhood(g, i, v, c);
        const bool in_j = in_neighbourhood(g, j, v, c);
        cells[in_i ? 1 : 0][in_j ? 1 : 0] += 1.0;
    }
    const double pi = (cells[1][0] + cells[1][1]) / n;
    const double pj = (cells[0][1] + cells[1][1]) / n;
    const double marg_i[2] = {1.0 - pi, pi};
    const double marg_j[2] = {1.0 - pj, pj};
    double mi = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const double p = cells[a][b] / n;
            if (p > 0.0) mi += p * std::log(p / (marg_i[a] * marg_j[b]));
        }
    }
    return mi < 0.0 ? 0.0 : mi;
}

}  // namespace n2n::testing
