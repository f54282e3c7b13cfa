#include "n2n/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace n2n {
namespace {

double floored(double norm) { return std::max(norm, kNormFloor); }

double row_norm(std::span<const double> r) { return std::sqrt(dot(r, r)); }

/// d cos(u,v)/du scaled by g, accumulated into out. `unit_u`/`unit_v` are the
/// norm-floored unit rows.
void add_cosine_grad(std::span<double> out, double g, std::span<const double> unit_u,
                     std::span<const double> unit_v, double sim, double nu_raw, double nu_floored) {
    const double inv = g / nu_floored;
    if (nu_raw > kNormFloor) {
        for (std::size_t c = 0; c < out.size(); ++c) {
            out[c] += inv * (unit_v[c] - sim * unit_u[c]);
        }
    } else {
        // Below the floor the norm is clamped constant, so only the linear term survives.
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += inv * unit_v[c];
    }
}

std::vector<NodeId> iota_ids(std::size_t n) {
    std::vector<NodeId> ids(n);
    std::iota(ids.begin(), ids.end(), NodeId{0});
    return ids;
}

}  // namespace

Representations Representations::from(Matrix m) {
    Representations r;
    r.row_norms.resize(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) r.row_norms[i] = row_norm(m.row(i));
    r.h = std::move(m);
    return r;
}

Matrix aggregate_positives(const Matrix& h, const PositiveAssignment& a) {
    if (a.positives.size() != h.rows) {
        throw std::invalid_argument("aggregate_positives: assignment covers " +
                                    std::to_string(a.positives.size()) + " nodes, have " +
                                    std::to_string(h.rows));
    }
    Matrix s(h.rows, h.cols);
    for (std::size_t i = 0; i < h.rows; ++i) {
        const auto& pos = a.positives[i];
        auto out = s.row(i);
        if (pos.empty()) {
            const auto self = h.row(i);
            std::copy(self.begin(), self.end(), out.begin());
            continue;
        }
        for (const NodeId j : pos) {
            if (j >= h.rows) {
                throw std::out_of_range("aggregate_positives: positive id " + std::to_string(j) +
                                        " out of range");
            }
            const auto src = h.row(j);
            for (std::size_t c = 0; c < h.cols; ++c) out[c] += src[c];
        }
        const double inv = 1.0 / static_cast<double>(pos.size());
        for (double& v : out) v *= inv;
    }
    return s;
}

Matrix scatter_positive_grad(const Matrix& d_s, const PositiveAssignment& a) {
    Matrix d_h(d_s.rows, d_s.cols);
    for (std::size_t i = 0; i < d_s.rows; ++i) {
        const auto& pos = a.positives[i];
        const auto src = d_s.row(i);
        if (pos.empty()) {
            auto out = d_h.row(i);
            for (std::size_t c = 0; c < d_s.cols; ++c) out[c] += src[c];
            continue;
        }
        const double inv = 1.0 / static_cast<double>(pos.size());
        for (const NodeId j : pos) {
            auto out = d_h.row(j);
            for (std::size_t c = 0; c < d_s.cols; ++c) out[c] += inv * src[c];
        }
    }
    return d_h;
}

DenominatorMode denominator_from_string(const std::string& s) {
    if (s == "literal") return DenominatorMode::Literal;
    if (s == "standard") return DenominatorMode::Standard;
    throw std::invalid_argument("unknown denominator mode '" + s + "'");
}

std::string to_string(DenominatorMode m) {
    return m == DenominatorMode::Literal ? "literal" : "standard";
}

InfoNceResult infonce_loss_grad(const Representations& h, const Representations& s, double tau,
                                DenominatorMode mode, std::span<const NodeId> anchors,
                                std::span<const NodeId> negatives) {
    if (tau <= 0.0) throw std::invalid_argument("infonce: tau must be > 0");
    if (!h.h.same_shape(s.h)) throw std::invalid_argument("infonce: h and s shape mismatch");

    const std::size_t n = h.h.rows;
    const std::size_t dim = h.h.cols;

    std::vector<NodeId> all;
    if (anchors.empty() || negatives.empty()) all = iota_ids(n);
    if (anchors.empty()) anchors = all;
    if (negatives.empty()) negatives = all;

    // Norm-floored unit rows; similarities become plain dot products.
    Matrix h_unit(n, dim), s_unit(n, dim);
    for (std::size_t i = 0; i < n; ++i) {
        const double inv_h = 1.0 / floored(h.row_norms[i]);
        const double inv_s = 1.0 / floored(s.row_norms[i]);
        const auto hr = h.h.row(i);
        const auto sr = s.h.row(i);
        auto hu = h_unit.row(i);
        auto su = s_unit.row(i);
        for (std::size_t c = 0; c < dim; ++c) {
            hu[c] = hr[c] * inv_h;
            su[c] = sr[c] * inv_s;
        }
    }

    InfoNceResult res;
    res.d_h = Matrix(n, dim);
    res.d_s = Matrix(n, dim);

    const double inv_count = 1.0 / static_cast<double>(anchors.size());
    std::vector<double> sims(negatives.size());
    std::vector<double> weights(negatives.size());
    double total = 0.0;

    for (const NodeId i : anchors) {
        const auto hu_i = h_unit.row(i);
        const double pos_sim = dot(s_unit.row(i), hu_i);

        double max_arg = pos_sim / tau;  // participates only in standard mode
        if (mode == DenominatorMode::Literal) max_arg = -INFINITY;
        for (std::size_t k = 0; k < negatives.size(); ++k) {
            if (mode == DenominatorMode::Standard && negatives[k] == i) {
                sims[k] = 0.0;
                continue;
            }
            sims[k] = dot(h_unit.row(negatives[k]), hu_i);
            max_arg = std::max(max_arg, sims[k] / tau);
        }

        double sum_exp = 0.0;
        for (std::size_t k = 0; k < negatives.size(); ++k) {
            if (mode == DenominatorMode::Standard && negatives[k] == i) {
                weights[k] = 0.0;
                continue;
            }
            weights[k] = std::exp(sims[k] / tau - max_arg);
            sum_exp += weights[k];
        }
        double pos_weight = 0.0;
        if (mode == DenominatorMode::Standard) {
            pos_weight = std::exp(pos_sim / tau - max_arg);
            sum_exp += pos_weight;
        }
        const double log_z = max_arg + std::log(sum_exp);
        total += -pos_sim / tau + log_z;

        // d loss / d pos_sim, and the softmax weights for each negative sim.
        const double base = inv_count / tau;
        double g_pos = -base;
        if (mode == DenominatorMode::Standard) g_pos += base * (pos_weight / sum_exp);

        add_cosine_grad(res.d_s.row(i), g_pos, s_unit.row(i), hu_i, pos_sim, s.row_norms[i],
                        floored(s.row_norms[i]));
        add_cosine_grad(res.d_h.row(i), g_pos, hu_i, s_unit.row(i), pos_sim, h.row_norms[i],
                        floored(h.row_norms[i]));

        for (std::size_t k = 0; k < negatives.size(); ++k) {
            const NodeId node_k = negatives[k];
            if (mode == DenominatorMode::Standard && node_k == i) continue;
            const double g = base * (weights[k] / sum_exp);
            add_cosine_grad(res.d_h.row(node_k), g, h_unit.row(node_k), hu_i, sims[k],
                            h.row_norms[node_k], floored(h.row_norms[node_k]));
            add_cosine_grad(res.d_h.row(i), g, hu_i, h_unit.row(node_k), sims[k], h.row_norms[i],
                            floored(h.row_norms[i]));
        }
    }
    res.loss = total * inv_count;
    return res;
}

CrossEntropyResult cross_entropy_loss_grad(const Matrix& logits, const std::vector<int>& labels,
                                           std::span<const NodeId> mask) {
    if (mask.empty()) throw std::invalid_argument("cross_entropy: empty mask");
    if (labels.size() != logits.rows) {
        throw std::invalid_argument("cross_entropy: label count mismatch");
    }
    CrossEntropyResult res;
    res.d_logits = Matrix(logits.rows, logits.cols);
    const double inv_count = 1.0 / static_cast<double>(mask.size());
    double total = 0.0;
    for (const NodeId i : mask) {
        if (i >= logits.rows) {
            throw std::out_of_range("cross_entropy: mask node " + std::to_string(i) +
                                    " out of range");
        }
        const auto row = logits.row(i);
        const int label = labels[i];
        if (label < 0 || static_cast<std::size_t>(label) >= logits.cols) {
            throw std::invalid_argument("cross_entropy: label out of range at node " +
                                        std::to_string(i));
        }
        const double m = *std::max_element(row.begin(), row.end());
        double sum_exp = 0.0;
        for (const double v : row) sum_exp += std::exp(v - m);
        const double lse = m + std::log(sum_exp);
        total += lse - row[static_cast<std::size_t>(label)];

        auto grad = res.d_logits.row(i);
        for (std::size_t c = 0; c < logits.cols; ++c) {
            grad[c] = std::exp(row[c] - lse) * inv_count;
        }
        grad[static_cast<std::size_t>(label)] -= inv_count;
    }
    res.loss = total * inv_count;
    return res;
}

CombinedLoss combine_losses(double ce_loss, double infonce_loss, double alpha) {
    if (alpha < 0.0 || alpha > 1.0) {
        throw std::invalid_argument("combine_losses: alpha must be in [0, 1]");
    }
    CombinedLoss c;
    c.ce_weight = 1.0 - alpha;
    c.infonce_weight = alpha;
    c.loss = c.ce_weight * ce_loss + c.infonce_weight * infonce_loss;
    return c;
}

}  // namespace n2n
