#pragma once

#include "n2n/dataset.hpp"

#include <cstdint>

namespace n2n {

/// Stochastic block model configuration. Block labels double as class labels;
/// per-block Gaussian feature means are placed so that any two means are
/// `mean_separation` apart (requires feature_dim >= n_blocks for that to hold
/// exactly).
struct SbmConfig {
    std::size_t n_nodes = 1000;
    std::size_t n_blocks = 5;
    double p_in = 0.05;
    double p_out = 0.002;
    std::size_t feature_dim = 64;
    double mean_separation = 3.0;
    double noise_sigma = 1.0;
    std::uint64_t seed = 7;
};

/// Deterministic SBM sample: intra-block pairs are edges with probability
/// p_in, inter-block with p_out; features are block mean + N(0, noise_sigma^2)
/// noise; splits are per-class stratified 10/10/80.
Dataset generate_sbm(const SbmConfig& cfg);

}  // namespace n2n
