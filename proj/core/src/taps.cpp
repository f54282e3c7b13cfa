#include "n2n/taps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

namespace n2n {
namespace {

/// |open neighbours of a  ∩  open neighbours of b| via two-pointer merge.
std::size_t open_intersection_size(std::span<const NodeId> a, std::span<const NodeId> b) {
    std::size_t count = 0, ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] < b[ib]) {
            ++ia;
        } else if (a[ia] > b[ib]) {
            ++ib;
        } else {
            ++count;
            ++ia;
            ++ib;
        }
    }
    return count;
}

/// MI of the 2x2 joint with cell counts (n11, n10, n01, n00) over universe v.
/// Empty cells contribute 0 (the 0*ln 0 convention). Tiny negative rounding
/// residue is clamped so scores stay non-negative.
double mi_from_cells(std::size_t n11, std::size_t n10, std::size_t n01, std::size_t n00,
                     std::size_t v) {
    const double inv_v = 1.0 / static_cast<double>(v);
    const double pi = static_cast<double>(n11 + n10) * inv_v;
    const double pj = static_cast<double>(n11 + n01) * inv_v;
    const double qi = static_cast<double>(n01 + n00) * inv_v;
    const double qj = static_cast<double>(n10 + n00) * inv_v;

    double sum = 0.0;
    auto add = [&](std::size_t cell, double ma, double mb) {
        if (cell == 0) return;
        const double p = static_cast<double>(cell) * inv_v;
        sum += p * std::log(p / (ma * mb));
    };
    add(n11, pi, pj);
    add(n10, pi, qj);
    add(n01, qi, pj);
    add(n00, qi, qj);
    return std::max(sum, 0.0);
}

double dependency_ordered(const Graph& g, NodeId i, NodeId j, NeighbourhoodConvention convention) {
    const std::size_t v = g.num_nodes();
    const std::size_t shared_open = open_intersection_size(g.neighbours(i), g.neighbours(j));
    std::size_t n11, ni, nj;
    if (convention == NeighbourhoodConvention::Closed) {
        // Closed sets add i and j themselves; for an adjacent pair both land in
        // the intersection.
        n11 = shared_open + 2;
        ni = g.degree(i) + 1;
        nj = g.degree(j) + 1;
    } else {
        n11 = shared_open;
        ni = g.degree(i);
        nj = g.degree(j);
    }
    return mi_from_cells(n11, ni - n11, nj - n11, v - ni - nj + n11, v);
}

}  // namespace

double structural_dependency(const Graph& g, NodeId i, NodeId j,
                             NeighbourhoodConvention convention) {
    if (i >= g.num_nodes() || j >= g.num_nodes()) {
        throw std::out_of_range("structural_dependency: node id out of range");
    }
    if (!g.adjacent(i, j)) {
        throw std::invalid_argument("structural_dependency: " + std::to_string(j) +
                                    " is not adjacent to " + std::to_string(i));
    }
    // Canonical argument order makes score(i,j) == score(j,i) bit-exact.
    if (i > j) std::swap(i, j);
    return dependency_ordered(g, i, j, convention);
}

DependencyTable build_dependency_table(const Graph& g, NeighbourhoodConvention convention) {
    DependencyTable t;
    t.convention_ = convention;
    t.offsets_ = g.offsets();
    t.neighbours_.assign(g.adjacency().begin(), g.adjacency().end());
    t.scores_.resize(t.neighbours_.size());

    const std::size_t n = g.num_nodes();
    for (NodeId i = 0; i < n; ++i) {
        const auto ns = g.neighbours(i);
        for (std::size_t k = 0; k < ns.size(); ++k) {
            const NodeId j = ns[k];
            if (j < i) continue;  // mirrored below
            const double s = dependency_ordered(g, i, j, convention);
            t.scores_[t.offsets_[i] + k] = s;
            // Locate i in j's neighbour list to store the mirror entry.
            const auto njs = g.neighbours(j);
            const auto it = std::lower_bound(njs.begin(), njs.end(), i);
            t.scores_[t.offsets_[j] + static_cast<std::size_t>(it - njs.begin())] = s;
        }
    }

    // Rank each node's list: score descending, ties by ascending id.
    std::vector<std::size_t> order;
    std::vector<NodeId> tmp_n;
    std::vector<double> tmp_s;
    for (NodeId i = 0; i < n; ++i) {
        const std::size_t begin = t.offsets_[i];
        const std::size_t deg = t.offsets_[i + 1] - begin;
        if (deg < 2) continue;
        order.resize(deg);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double sa = t.scores_[begin + a], sb = t.scores_[begin + b];
            if (sa != sb) return sa > sb;
            return t.neighbours_[begin + a] < t.neighbours_[begin + b];
        });
        tmp_n.resize(deg);
        tmp_s.resize(deg);
        for (std::size_t k = 0; k < deg; ++k) {
            tmp_n[k] = t.neighbours_[begin + order[k]];
            tmp_s[k] = t.scores_[begin + order[k]];
        }
        std::copy(tmp_n.begin(), tmp_n.end(), t.neighbours_.begin() + static_cast<std::ptrdiff_t>(begin));
        std::copy(tmp_s.begin(), tmp_s.end(), t.scores_.begin() + static_cast<std::ptrdiff_t>(begin));
    }
    return t;
}

double DependencyTable::score(NodeId i, NodeId j) const {
    const auto ns = ranked_neighbours(i);
    const auto ss = scores(i);
    for (std::size_t k = 0; k < ns.size(); ++k) {
        if (ns[k] == j) return ss[k];
    }
    throw std::invalid_argument("DependencyTable::score: " + std::to_string(j) +
                                " is not a neighbour of " + std::to_string(i));
}

namespace {
constexpr char kTableMagic[8] = {'N', '2', 'N', 'D', 'E', 'P', '0', '1'};

template <class T>
void write_raw(std::ofstream& out, const T* p, std::size_t count) {
    out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(count * sizeof(T)));
}

template <class T>
void read_raw(std::ifstream& in, T* p, std::size_t count) {
    in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(count * sizeof(T)));
}
}  // namespace

void DependencyTable::save(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out.write(kTableMagic, sizeof kTableMagic);
    const std::uint32_t conv = convention_ == NeighbourhoodConvention::Closed ? 0 : 1;
    const std::uint64_t n = num_nodes();
    const std::uint64_t m = num_entries();
    write_raw(out, &conv, 1);
    write_raw(out, &n, 1);
    write_raw(out, &m, 1);
    std::vector<std::uint64_t> offs(offsets_.begin(), offsets_.end());
    write_raw(out, offs.data(), offs.size());
    write_raw(out, neighbours_.data(), neighbours_.size());
    write_raw(out, scores_.data(), scores_.size());
}

DependencyTable DependencyTable::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kTableMagic, sizeof magic) != 0) {
        throw std::runtime_error(file.string() + " is not a dependency table file");
    }
    std::uint32_t conv = 0;
    std::uint64_t n = 0, m = 0;
    read_raw(in, &conv, 1);
    read_raw(in, &n, 1);
    read_raw(in, &m, 1);
    DependencyTable t;
    t.convention_ = conv == 0 ? NeighbourhoodConvention::Closed : NeighbourhoodConvention::Open;
    std::vector<std::uint64_t> offs(n + 1);
    read_raw(in, offs.data(), offs.size());
    t.offsets_.assign(offs.begin(), offs.end());
    t.neighbours_.resize(m);
    t.scores_.resize(m);
    read_raw(in, t.neighbours_.data(), m);
    read_raw(in, t.scores_.data(), m);
    if (!in) throw std::runtime_error(file.string() + ": truncated dependency table");
    return t;
}

PositiveAssignment select_positives(const DependencyTable& t, std::size_t x) {
    if (x == 0) throw std::invalid_argument("select_positives: x must be >= 1");
    PositiveAssignment a;
    a.requested = x;
    a.positives.resize(t.num_nodes());
    for (NodeId i = 0; i < t.num_nodes(); ++i) {
        const auto ranked = t.ranked_neighbours(i);
        const std::size_t take = std::min(x, ranked.size());
        auto& list = a.positives[i];
        list.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take));
        std::sort(list.begin(), list.end());
    }
    return a;
}

PositiveAssignment all_neighbour_positives(const Graph& g) {
    PositiveAssignment a;
    a.requested = 0;
    a.positives.resize(g.num_nodes());
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
        const auto ns = g.neighbours(i);
        a.positives[i].assign(ns.begin(), ns.end());
    }
    return a;
}

PositiveAssignment random_positives(const Graph& g, std::size_t x, Rng& rng) {
    if (x == 0) throw std::invalid_argument("random_positives: x must be >= 1");
    PositiveAssignment a;
    a.requested = x;
    a.positives.resize(g.num_nodes());
    std::vector<NodeId> pool;
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
        const auto ns = g.neighbours(i);
        const std::size_t take = std::min(x, ns.size());
        if (take == 0) continue;
        if (take == ns.size()) {
            a.positives[i].assign(ns.begin(), ns.end());
            continue;
        }
        pool.assign(ns.begin(), ns.end());
        // Partial Fisher-Yates: the first `take` slots end up a uniform sample.
        for (std::size_t k = 0; k < take; ++k) {
            const std::size_t pick = k + static_cast<std::size_t>(rng.below(pool.size() - k));
            std::swap(pool[k], pool[pick]);
        }
        auto& list = a.positives[i];
        list.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
        std::sort(list.begin(), list.end());
    }
    return a;
}

Partition taps_partition(const DependencyTable& t) {
    const std::size_t n = t.num_nodes();
    std::vector<NodeId> parent(n);
    std::iota(parent.begin(), parent.end(), NodeId{0});
    auto find = [&](NodeId v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    auto unite = [&](NodeId a, NodeId b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b);
        parent[b] = a;  // smaller id becomes the root
    };

    for (NodeId i = 0; i < n; ++i) {
        const auto ranked = t.ranked_neighbours(i);
        if (!ranked.empty()) unite(i, ranked[0]);
    }

    Partition p;
    p.component_of.resize(n);
    std::vector<NodeId> root_to_component(n, static_cast<NodeId>(n));
    for (NodeId i = 0; i < n; ++i) {
        const NodeId r = find(i);
        if (root_to_component[r] == static_cast<NodeId>(n)) {
            root_to_component[r] = static_cast<NodeId>(p.members.size());
            p.members.emplace_back();
        }
        p.component_of[i] = root_to_component[r];
        p.members[p.component_of[i]].push_back(i);
    }
    return p;
}

PartitionStats partition_stats(const Partition& p, const std::vector<int>& labels) {
    if (labels.size() != p.component_of.size()) {
        throw std::invalid_argument("partition_stats: label array does not cover all nodes");
    }
    PartitionStats stats;
    stats.component_purity.reserve(p.members.size());
    std::size_t majority_total = 0;
    for (const auto& members : p.members) {
        ++stats.size_histogram[members.size()];
        std::map<int, std::size_t> counts;
        for (const NodeId v : members) ++counts[labels[v]];
        std::size_t majority = 0;
        for (const auto& [label, c] : counts) majority = std::max(majority, c);
        stats.component_purity.push_back(static_cast<double>(majority) /
                                         static_cast<double>(members.size()));
        majority_total += majority;
    }
    stats.mean_purity = p.component_of.empty()
                            ? 0.0
                            : static_cast<double>(majority_total) /
                                  static_cast<double>(p.component_of.size());
    return stats;
}

}  // namespace n2n
