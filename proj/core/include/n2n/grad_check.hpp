#pragma once

#include <cstdint>

#include "n2n/mlp.hpp"
#include "n2n/objectives.hpp"
#include "n2n/taps.hpp"

namespace n2n {

/// Which total loss the gradient check differentiates. Weighting is
/// (1 - alpha) * CE + alpha * InfoNCE + l2 * ||W||^2; alpha = 0 gives
/// CE-only, alpha = 1 InfoNCE-only. Dropout stays off throughout.
struct LossConfig {
    double alpha = 0.9;
    double tau = 5.0;
    DenominatorMode denominator = DenominatorMode::Literal;
    double l2 = 0.0;
};

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::size_t coords_checked = 0;
};

/// Total loss in eval mode: forward, aggregate positives, CE over `mask`,
/// InfoNCE over all nodes, combined per `cfg` plus the L2 penalty. This is
/// the scalar whose analytic gradient the training step applies.
double total_loss(const MlpParams& p, const Matrix& x, const std::vector<int>& labels,
                  std::span<const NodeId> mask, const PositiveAssignment& positives,
                  const LossConfig& cfg);

/// Compares the analytic gradient of total_loss against central finite
/// differences (eps = 1e-5) on `coords` randomly drawn parameter coordinates
/// (at least 100, spread over every tensor). Relative error per coordinate is
/// |a - f| / max(1e-6, |a|, |f|).
GradCheckReport grad_check(const MlpParams& p, const Matrix& x, const std::vector<int>& labels,
                           std::span<const NodeId> mask, const PositiveAssignment& positives,
                           const LossConfig& cfg, std::size_t coords = 120,
                           std::uint64_t seed = 1234);

}  // namespace n2n
