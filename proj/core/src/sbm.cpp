#include "n2n/sbm.hpp"

#include "n2n/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace n2n {

Dataset generate_sbm(const SbmConfig& cfg) {
    if (cfg.n_blocks < 1) throw std::invalid_argument("generate_sbm: n_blocks must be >= 1");
    if (cfg.p_out < 0.0 || cfg.p_in > 1.0 || cfg.p_out > cfg.p_in) {
        throw std::invalid_argument("generate_sbm: need 0 <= p_out <= p_in <= 1");
    }
    if (cfg.noise_sigma < 0.0) throw std::invalid_argument("generate_sbm: noise_sigma must be >= 0");

    const std::size_t n = cfg.n_nodes;
    auto block_of = [&](std::size_t i) {
        return static_cast<int>(i * cfg.n_blocks / n);
    };

    Dataset d;
    d.num_classes = cfg.n_blocks;
    d.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.labels[i] = block_of(i);

    // Independent streams per concern so changing one does not shift the others.
    Rng edge_rng(mix_seed(cfg.seed, 0xedULL));
    Rng feat_rng(mix_seed(cfg.seed, 0xfeULL));
    Rng split_rng(mix_seed(cfg.seed, 0x51ULL));

    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double p = d.labels[i] == d.labels[j] ? cfg.p_in : cfg.p_out;
            if (edge_rng.uniform01() < p) {
                edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
            }
        }
    }
    d.graph = Graph::from_edges(n, std::move(edges), &d.load_stats);

    // Block mean b sits at (mean_separation/sqrt(2)) * e_{b mod D}, so means of
    // distinct blocks are exactly mean_separation apart when D >= n_blocks.
    const double axis = cfg.mean_separation / std::sqrt(2.0);
    d.features = Matrix(n, cfg.feature_dim);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = d.features.row(i);
        for (std::size_t c = 0; c < cfg.feature_dim; ++c) {
            row[c] = cfg.noise_sigma * feat_rng.normal();
        }
        row[static_cast<std::size_t>(d.labels[i]) % cfg.feature_dim] += axis;
    }

    // Per-class stratified 10/10/80 split.
    for (std::size_t b = 0; b < cfg.n_blocks; ++b) {
        std::vector<NodeId> members;
        for (std::size_t i = 0; i < n; ++i) {
            if (d.labels[i] == static_cast<int>(b)) members.push_back(static_cast<NodeId>(i));
        }
        split_rng.shuffle(members);
        const std::size_t n_train = std::max<std::size_t>(1, members.size() / 10);
        const std::size_t n_val = std::max<std::size_t>(1, members.size() / 10);
        for (std::size_t k = 0; k < members.size(); ++k) {
            if (k < n_train) {
                d.train.push_back(members[k]);
            } else if (k < n_train + n_val) {
                d.val.push_back(members[k]);
            } else {
                d.test.push_back(members[k]);
            }
        }
    }
    return d;
}

}  // namespace n2n
