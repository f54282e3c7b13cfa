#pragma once

#include "n2n/graph.hpp"
#include "n2n/rng.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <vector>

namespace n2n {

/// Whether the neighbourhood-membership variable of a node includes the node
/// itself. The default is Closed: two adjacent nodes then always share at
/// least the pair itself.
enum class NeighbourhoodConvention { Closed, Open };

/// Graph-structural dependency between adjacent nodes i and j: the mutual
/// information (in nats) of the 2x2 joint distribution over a uniformly
/// sampled node landing inside/outside each of the two neighbourhoods.
/// Symmetric, non-negative, finite. Throws std::invalid_argument when j is
/// not adjacent to i.
double structural_dependency(const Graph& g, NodeId i, NodeId j,
                             NeighbourhoodConvention convention = NeighbourhoodConvention::Closed);

/// Per-node neighbour ranking by structural dependency, highest first, ties
/// broken by ascending neighbour id. Built once upfront; training never
/// recomputes scores.
class DependencyTable {
public:
    DependencyTable() = default;

    std::size_t num_nodes() const { return offsets_.size() - 1; }
    std::size_t num_entries() const { return neighbours_.size(); }
    NeighbourhoodConvention convention() const { return convention_; }

    /// Neighbours of i in rank order (best first).
    std::span<const NodeId> ranked_neighbours(NodeId i) const {
        return {neighbours_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    /// Scores aligned with ranked_neighbours(i).
    std::span<const double> scores(NodeId i) const {
        return {scores_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    /// Score of the stored pair (i, j); throws when j is not a neighbour of i.
    double score(NodeId i, NodeId j) const;

    void save(const std::filesystem::path& file) const;
    static DependencyTable load(const std::filesystem::path& file);

    friend DependencyTable build_dependency_table(const Graph&, NeighbourhoodConvention);

private:
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> neighbours_;
    std::vector<double> scores_;
    NeighbourhoodConvention convention_ = NeighbourhoodConvention::Closed;
};

DependencyTable build_dependency_table(
    const Graph& g, NeighbourhoodConvention convention = NeighbourhoodConvention::Closed);

/// Selected contrastive positives per node: the top-min(x, degree) prefix of
/// the dependency ranking, stored ascending. Isolated nodes get an empty list.
struct PositiveAssignment {
    std::size_t requested = 0;                   // x
    std::vector<std::vector<NodeId>> positives;  // per node, ascending
};

/// Throws std::invalid_argument when x == 0.
PositiveAssignment select_positives(const DependencyTable& t, std::size_t x);

/// Every open neighbour of every node, i.e. the aggregation-over-all-neighbours
/// configuration (no sampling).
PositiveAssignment all_neighbour_positives(const Graph& g);

/// Uniform draw of min(x, degree) open neighbours per node, without
/// replacement; the baseline against which topology-aware sampling is judged.
PositiveAssignment random_positives(const Graph& g, std::size_t x, Rng& rng);

/// Connected components of the union of {i, top1(i)} edges over non-isolated
/// nodes; isolated nodes are singletons. Component ids are assigned in order
/// of each component's smallest member.
struct Partition {
    std::vector<NodeId> component_of;         // per node
    std::vector<std::vector<NodeId>> members;  // per component, ascending
    std::size_t num_components() const { return members.size(); }
};

Partition taps_partition(const DependencyTable& t);

struct PartitionStats {
    std::map<std::size_t, std::size_t> size_histogram;  // component size -> count
    std::vector<double> component_purity;               // majority-label share per component
    double mean_purity = 0.0;                           // node-weighted
};

PartitionStats partition_stats(const Partition& p, const std::vector<int>& labels);

}  // namespace n2n
