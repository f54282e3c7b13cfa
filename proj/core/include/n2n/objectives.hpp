#pragma once

#include "n2n/matrix.hpp"
#include "n2n/taps.hpp"

#include <span>
#include <vector>

namespace n2n {

/// Node representations with cached row L2 norms. Norms are floored at 1e-12
/// wherever they divide, so all-zero rows (possible early under ReLU) yield
/// similarity 0 instead of NaN.
struct Representations {
    Matrix h;
    std::vector<double> row_norms;

    static Representations from(Matrix m);
};

constexpr double kNormFloor = 1e-12;

/// Positive (neighbourhood) representation per node: the mean of the selected
/// positives' rows. A single positive is a plain row copy (no aggregation);
/// an empty list falls back to the node's own row.
Matrix aggregate_positives(const Matrix& h, const PositiveAssignment& a);

/// Routes a gradient w.r.t. the aggregate rows back to the underlying
/// representation rows (the transpose of aggregate_positives).
Matrix scatter_positive_grad(const Matrix& d_s, const PositiveAssignment& a);

/// Literal: the denominator sums exp(cos(h_k, h_i)/tau) over every node k,
/// self included, without adding the positive term. Standard: the common
/// InfoNCE form, positive term included and self excluded.
enum class DenominatorMode { Literal, Standard };

DenominatorMode denominator_from_string(const std::string& s);
std::string to_string(DenominatorMode m);

struct InfoNceResult {
    double loss = 0.0;
    Matrix d_h;  // gradient w.r.t. every representation row
    Matrix d_s;  // gradient w.r.t. every positive-aggregate row
};

/// Contrastive alignment loss between each node and its positive aggregate,
/// averaged over `anchors` with negatives drawn from `negatives` (both default
/// to all nodes). Gradients are exact for the chosen denominator mode,
/// including the cosine-normalization terms, and flow into both h and s.
/// Throws std::invalid_argument for tau <= 0.
InfoNceResult infonce_loss_grad(const Representations& h, const Representations& s, double tau,
                                DenominatorMode mode = DenominatorMode::Literal,
                                std::span<const NodeId> anchors = {},
                                std::span<const NodeId> negatives = {});

struct CrossEntropyResult {
    double loss = 0.0;
    Matrix d_logits;  // zero outside the mask; masked rows sum to 0
};

/// Mean negative log-softmax over the masked nodes, log-sum-exp stabilized.
/// Throws std::invalid_argument for an empty mask.
CrossEntropyResult cross_entropy_loss_grad(const Matrix& logits, const std::vector<int>& labels,
                                           std::span<const NodeId> mask);

struct CombinedLoss {
    double loss = 0.0;      // (1-alpha)*ce + alpha*infonce
    double ce_weight = 0.0;      // scales d_logits
    double infonce_weight = 0.0; // scales d_h and d_s
};

/// Joint-training combination; throws when alpha is outside [0, 1].
CombinedLoss combine_losses(double ce_loss, double infonce_loss, double alpha);

}  // namespace n2n
