#pragma once

#include "n2n/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace n2n {

/// Encoder layout. TwoHiddenPlusHead is D -> H -> H (ReLU each) with a linear
/// H -> C head; HiddenPlusClassifier drops the second hidden layer (D -> H
/// plus head), in which case w2/b2 are empty.
enum class Arch { TwoHiddenPlusHead, HiddenPlusClassifier };

Arch arch_from_string(const std::string& s);
std::string to_string(Arch a);

struct MlpParams {
    Arch arch = Arch::TwoHiddenPlusHead;
    Matrix w1;                 // D x H
    std::vector<double> b1;    // H
    Matrix w2;                 // H x H (empty for HiddenPlusClassifier)
    std::vector<double> b2;    // H
    Matrix whead;              // H x C
    std::vector<double> bhead; // C

    std::size_t input_dim() const { return w1.rows; }
    std::size_t hidden_dim() const { return w1.cols; }
    std::size_t num_classes() const { return whead.cols; }
};

/// Glorot-uniform weights, zero biases. Deterministic given seed.
MlpParams init_params(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes,
                      Arch arch, std::uint64_t seed);

enum class ForwardMode { Train, Eval };

/// Everything the backward pass needs, plus the outputs: node representations
/// `h` (the InfoNCE attachment point) and head `logits`. Dropout masks hold
/// 0 or 1/keep (inverted dropout); in Eval mode they are empty and the pass
/// is deterministic.
struct ForwardCache {
    Matrix dropped_input;  // X after input dropout (== X in eval mode)
    Matrix z1;             // pre-activation of hidden layer 1
    Matrix dropped_a1;     // ReLU(z1) after dropout, input of layer 2
    Matrix z2;             // pre-activation of hidden layer 2
    Matrix h;              // representations, n x H
    Matrix logits;         // n x C
    Matrix mask0;          // input dropout mask (train mode only)
    Matrix mask1;          // layer-2 input dropout mask (train mode only)
};

ForwardCache forward(const MlpParams& p, const Matrix& x, double dropout_rate, ForwardMode mode,
                     std::uint64_t dropout_seed = 0);

struct MlpGrads {
    Matrix w1;
    std::vector<double> b1;
    Matrix w2;
    std::vector<double> b2;
    Matrix whead;
    std::vector<double> bhead;
};

/// Exact reverse-mode gradients of the forward pass for upstream gradients
/// d_h (w.r.t. representations) and d_logits, plus 2*l2*W on every weight
/// matrix (biases excluded).
MlpGrads backward(const MlpParams& p, const ForwardCache& cache, const Matrix& d_h,
                  const Matrix& d_logits, double l2);

/// Sum of squared weight-matrix entries (biases excluded); the penalty term
/// is l2 * this value.
double weight_squared_norm(const MlpParams& p, bool include_head = true);

struct AdamState {
    MlpGrads m;  // first moments, same shapes as the parameters
    MlpGrads v;  // second moments
    std::uint64_t step = 0;
};

AdamState init_adam(const MlpParams& p);

/// Standard Adam (beta1=0.9, beta2=0.999, eps=1e-8) with bias correction.
/// `update_head` false leaves the classification head untouched.
void adam_step(MlpParams& p, const MlpGrads& grads, AdamState& state, double lr,
               bool update_head = true);

}  // namespace n2n
