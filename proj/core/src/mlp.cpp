#include "n2n/mlp.hpp"

#include "n2n/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace n2n {
namespace {

void glorot_fill(Matrix& w, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(w.rows + w.cols));
    for (double& v : w.data) v = (2.0 * rng.uniform01() - 1.0) * bound;
}

Matrix dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng) {
    Matrix m(rows, cols);
    const double inv_keep = 1.0 / (1.0 - rate);
    for (double& v : m.data) v = rng.uniform01() < rate ? 0.0 : inv_keep;
    return m;
}

/// out = a * w + bias, rows of `a` against columns of `w`.
Matrix affine(const Matrix& a, const Matrix& w, const std::vector<double>& bias) {
    if (a.cols != w.rows) throw std::invalid_argument("affine: shape mismatch");
    Matrix out(a.rows, w.cols);
    for (std::size_t r = 0; r < a.rows; ++r) {
        auto out_row = out.row(r);
        for (std::size_t c = 0; c < w.cols; ++c) out_row[c] = bias[c];
        const auto a_row = a.row(r);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double av = a_row[k];
            if (av == 0.0) continue;
            const auto w_row = w.row(k);
            for (std::size_t c = 0; c < w.cols; ++c) out_row[c] += av * w_row[c];
        }
    }
    return out;
}

Matrix relu(const Matrix& z) {
    Matrix out = z;
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    Matrix out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b.data[i];
    return out;
}

/// grad_w += a^T * d  accumulated row-block at a time.
void accumulate_at_d(const Matrix& a, const Matrix& d, Matrix& grad_w) {
    for (std::size_t r = 0; r < a.rows; ++r) {
        const auto a_row = a.row(r);
        const auto d_row = d.row(r);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double av = a_row[k];
            if (av == 0.0) continue;
            auto g_row = grad_w.row(k);
            for (std::size_t c = 0; c < d.cols; ++c) g_row[c] += av * d_row[c];
        }
    }
}

/// out = d * w^T.
Matrix matmul_bt(const Matrix& d, const Matrix& w) {
    Matrix out(d.rows, w.rows);
    for (std::size_t r = 0; r < d.rows; ++r) {
        const auto d_row = d.row(r);
        auto out_row = out.row(r);
        for (std::size_t k = 0; k < w.rows; ++k) out_row[k] = dot(d_row, w.row(k));
    }
    return out;
}

std::vector<double> column_sums(const Matrix& m) {
    std::vector<double> s(m.cols, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const auto row = m.row(r);
        for (std::size_t c = 0; c < m.cols; ++c) s[c] += row[c];
    }
    return s;
}

void relu_backward_inplace(Matrix& grad, const Matrix& z) {
    for (std::size_t i = 0; i < grad.data.size(); ++i) {
        if (z.data[i] <= 0.0) grad.data[i] = 0.0;
    }
}

}  // namespace

Arch arch_from_string(const std::string& s) {
    if (s == "two_hidden_plus_head") return Arch::TwoHiddenPlusHead;
    if (s == "hidden_plus_classifier") return Arch::HiddenPlusClassifier;
    throw std::invalid_argument("unknown arch '" + s + "'");
}

std::string to_string(Arch a) {
    return a == Arch::TwoHiddenPlusHead ? "two_hidden_plus_head" : "hidden_plus_classifier";
}

MlpParams init_params(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes,
                      Arch arch, std::uint64_t seed) {
    if (input_dim < 1 || hidden_dim < 1 || num_classes < 1) {
        throw std::invalid_argument("init_params: dimensions must be >= 1");
    }
    Rng rng(mix_seed(seed, 0x11ULL));
    MlpParams p;
    p.arch = arch;
    p.w1 = Matrix(input_dim, hidden_dim);
    glorot_fill(p.w1, rng);
    p.b1.assign(hidden_dim, 0.0);
    if (arch == Arch::TwoHiddenPlusHead) {
        p.w2 = Matrix(hidden_dim, hidden_dim);
        glorot_fill(p.w2, rng);
        p.b2.assign(hidden_dim, 0.0);
    }
    p.whead = Matrix(hidden_dim, num_classes);
    glorot_fill(p.whead, rng);
    p.bhead.assign(num_classes, 0.0);
    return p;
}

ForwardCache forward(const MlpParams& p, const Matrix& x, double dropout_rate, ForwardMode mode,
                     std::uint64_t dropout_seed) {
    if (x.cols != p.input_dim()) {
        throw std::invalid_argument("forward: feature dim " + std::to_string(x.cols) +
                                    " != encoder input dim " + std::to_string(p.input_dim()));
    }
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
        throw std::invalid_argument("forward: dropout rate must be in [0, 1)");
    }
    const bool drop = mode == ForwardMode::Train && dropout_rate > 0.0;
    Rng rng(mix_seed(dropout_seed, 0xd0ULL));

    ForwardCache c;
    if (drop) {
        c.mask0 = dropout_mask(x.rows, x.cols, dropout_rate, rng);
        c.dropped_input = hadamard(x, c.mask0);
    } else {
        c.dropped_input = x;
    }
    c.z1 = affine(c.dropped_input, p.w1, p.b1);
    Matrix a1 = relu(c.z1);

    if (p.arch == Arch::TwoHiddenPlusHead) {
        if (drop) {
            c.mask1 = dropout_mask(a1.rows, a1.cols, dropout_rate, rng);
            c.dropped_a1 = hadamard(a1, c.mask1);
        } else {
            c.dropped_a1 = std::move(a1);
        }
        c.z2 = affine(c.dropped_a1, p.w2, p.b2);
        c.h = relu(c.z2);
    } else {
        c.h = std::move(a1);
    }
    c.logits = affine(c.h, p.whead, p.bhead);
    return c;
}

MlpGrads backward(const MlpParams& p, const ForwardCache& cache, const Matrix& d_h,
                  const Matrix& d_logits, double l2) {
    if (!d_h.same_shape(cache.h) || !d_logits.same_shape(cache.logits)) {
        throw std::invalid_argument("backward: upstream gradient shape mismatch");
    }
    MlpGrads g;
    g.whead = Matrix(p.whead.rows, p.whead.cols);
    accumulate_at_d(cache.h, d_logits, g.whead);
    g.bhead = column_sums(d_logits);

    Matrix dh_total = matmul_bt(d_logits, p.whead);
    for (std::size_t i = 0; i < dh_total.data.size(); ++i) dh_total.data[i] += d_h.data[i];

    if (p.arch == Arch::TwoHiddenPlusHead) {
        relu_backward_inplace(dh_total, cache.z2);  // now d(z2)
        g.w2 = Matrix(p.w2.rows, p.w2.cols);
        accumulate_at_d(cache.dropped_a1, dh_total, g.w2);
        g.b2 = column_sums(dh_total);

        Matrix da1 = matmul_bt(dh_total, p.w2);
        if (cache.mask1.size() > 0) da1 = hadamard(da1, cache.mask1);
        relu_backward_inplace(da1, cache.z1);  // now d(z1)
        g.w1 = Matrix(p.w1.rows, p.w1.cols);
        accumulate_at_d(cache.dropped_input, da1, g.w1);
        g.b1 = column_sums(da1);
    } else {
        relu_backward_inplace(dh_total, cache.z1);
        g.w1 = Matrix(p.w1.rows, p.w1.cols);
        accumulate_at_d(cache.dropped_input, dh_total, g.w1);
        g.b1 = column_sums(dh_total);
        g.w2 = Matrix();
        g.b2.clear();
    }

    if (l2 != 0.0) {
        for (std::size_t i = 0; i < g.w1.data.size(); ++i) g.w1.data[i] += 2.0 * l2 * p.w1.data[i];
        for (std::size_t i = 0; i < g.w2.data.size(); ++i) g.w2.data[i] += 2.0 * l2 * p.w2.data[i];
        for (std::size_t i = 0; i < g.whead.data.size(); ++i) {
            g.whead.data[i] += 2.0 * l2 * p.whead.data[i];
        }
    }
    return g;
}

double weight_squared_norm(const MlpParams& p, bool include_head) {
    double s = 0.0;
    for (const double v : p.w1.data) s += v * v;
    for (const double v : p.w2.data) s += v * v;
    if (include_head) {
        for (const double v : p.whead.data) s += v * v;
    }
    return s;
}

AdamState init_adam(const MlpParams& p) {
    AdamState s;
    auto zeros_like = [](const Matrix& m) { return Matrix(m.rows, m.cols); };
    s.m.w1 = zeros_like(p.w1);
    s.m.w2 = zeros_like(p.w2);
    s.m.whead = zeros_like(p.whead);
    s.m.b1.assign(p.b1.size(), 0.0);
    s.m.b2.assign(p.b2.size(), 0.0);
    s.m.bhead.assign(p.bhead.size(), 0.0);
    s.v = s.m;
    return s;
}

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

void adam_update(std::vector<double>& param, const std::vector<double>& grad,
                 std::vector<double>& m, std::vector<double>& v, double lr, double bc1,
                 double bc2) {
    for (std::size_t i = 0; i < param.size(); ++i) {
        m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * grad[i];
        v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        param[i] -= lr * m_hat / (std::sqrt(v_hat) + kEps);
    }
}

}  // namespace

void adam_step(MlpParams& p, const MlpGrads& grads, AdamState& state, double lr,
               bool update_head) {
    ++state.step;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));
    adam_update(p.w1.data, grads.w1.data, state.m.w1.data, state.v.w1.data, lr, bc1, bc2);
    adam_update(p.b1, grads.b1, state.m.b1, state.v.b1, lr, bc1, bc2);
    if (p.arch == Arch::TwoHiddenPlusHead) {
        adam_update(p.w2.data, grads.w2.data, state.m.w2.data, state.v.w2.data, lr, bc1, bc2);
        adam_update(p.b2, grads.b2, state.m.b2, state.v.b2, lr, bc1, bc2);
    }
    if (update_head) {
        adam_update(p.whead.data, grads.whead.data, state.m.whead.data, state.v.whead.data, lr,
                    bc1, bc2);
        adam_update(p.bhead, grads.bhead, state.m.bhead, state.v.bhead, lr, bc1, bc2);
    }
}

}  // namespace n2n
