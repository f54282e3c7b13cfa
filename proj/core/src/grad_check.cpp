#include "n2n/grad_check.hpp"

#include <cmath>
#include <stdexcept>

#include "n2n/rng.hpp"

namespace n2n {
namespace {

constexpr double kEps = 1e-5;

struct TensorView {
    double* data;
    std::size_t size;
};

std::vector<TensorView> views(MlpParams& p) {
    std::vector<TensorView> v;
    v.push_back({p.w1.data.data(), p.w1.size()});
    v.push_back({p.b1.data(), p.b1.size()});
    if (p.arch == Arch::TwoHiddenPlusHead) {
        v.push_back({p.w2.data.data(), p.w2.size()});
        v.push_back({p.b2.data(), p.b2.size()});
    }
    v.push_back({p.whead.data.data(), p.whead.size()});
    v.push_back({p.bhead.data(), p.bhead.size()});
    return v;
}

std::vector<TensorView> views(MlpGrads& g, Arch arch) {
    std::vector<TensorView> v;
    v.push_back({g.w1.data.data(), g.w1.size()});
    v.push_back({g.b1.data(), g.b1.size()});
    if (arch == Arch::TwoHiddenPlusHead) {
        v.push_back({g.w2.data.data(), g.w2.size()});
        v.push_back({g.b2.data(), g.b2.size()});
    }
    v.push_back({g.whead.data.data(), g.whead.size()});
    v.push_back({g.bhead.data(), g.bhead.size()});
    return v;
}

}  // namespace

double total_loss(const MlpParams& p, const Matrix& x, const std::vector<int>& labels,
                  std::span<const NodeId> mask, const PositiveAssignment& positives,
                  const LossConfig& cfg) {
    const ForwardCache cache = forward(p, x, 0.0, ForwardMode::Eval);
    const auto h = Representations::from(cache.h);
    const auto s = Representations::from(aggregate_positives(cache.h, positives));
    const double nce = infonce_loss_grad(h, s, cfg.tau, cfg.denominator).loss;
    const double ce = cross_entropy_loss_grad(cache.logits, labels, mask).loss;
    const CombinedLoss combined = combine_losses(ce, nce, cfg.alpha);
    return combined.loss + cfg.l2 * weight_squared_norm(p);
}

GradCheckReport grad_check(const MlpParams& p, const Matrix& x, const std::vector<int>& labels,
                           std::span<const NodeId> mask, const PositiveAssignment& positives,
                           const LossConfig& cfg, std::size_t coords, std::uint64_t seed) {
    // Analytic gradient of the same scalar total_loss evaluates.
    const ForwardCache cache = forward(p, x, 0.0, ForwardMode::Eval);
    const auto h = Representations::from(cache.h);
    const auto s = Representations::from(aggregate_positives(cache.h, positives));
    const InfoNceResult nce = infonce_loss_grad(h, s, cfg.tau, cfg.denominator);
    const CrossEntropyResult ce = cross_entropy_loss_grad(cache.logits, labels, mask);
    const CombinedLoss weights = combine_losses(ce.loss, nce.loss, cfg.alpha);

    Matrix d_h = nce.d_h;
    {
        const Matrix scattered = scatter_positive_grad(nce.d_s, positives);
        for (std::size_t i = 0; i < d_h.size(); ++i) {
            d_h.data[i] = weights.infonce_weight * (d_h.data[i] + scattered.data[i]);
        }
    }
    Matrix d_logits = ce.d_logits;
    for (double& v : d_logits.data) v *= weights.ce_weight;
    MlpGrads analytic = backward(p, cache, d_h, d_logits, cfg.l2);

    MlpParams probe = p;  // mutated in place for the finite differences
    auto param_views = views(probe);
    auto grad_views = views(analytic, p.arch);

    std::size_t total_coords = 0;
    for (const auto& v : param_views) total_coords += v.size;
    if (coords < 100) coords = 100;

    // One coordinate from every tensor first, the rest uniform over all.
    Rng rng(mix_seed(seed, 0x9c));
    std::vector<std::pair<std::size_t, std::size_t>> picks;
    for (std::size_t t = 0; t < param_views.size(); ++t) {
        if (param_views[t].size == 0) continue;
        picks.emplace_back(t, rng.below(param_views[t].size));
    }
    while (picks.size() < coords) {
        std::size_t flat = rng.below(total_coords);
        for (std::size_t t = 0; t < param_views.size(); ++t) {
            if (flat < param_views[t].size) {
                picks.emplace_back(t, flat);
                break;
            }
            flat -= param_views[t].size;
        }
    }

    GradCheckReport report;
    for (const auto& [t, idx] : picks) {
        double& slot = param_views[t].data[idx];
        const double saved = slot;
        slot = saved + kEps;
        const double plus = total_loss(probe, x, labels, mask, positives, cfg);
        slot = saved - kEps;
        const double minus = total_loss(probe, x, labels, mask, positives, cfg);
        slot = saved;

        const double fd = (plus - minus) / (2.0 * kEps);
        const double an = grad_views[t].data[idx];
        const double rel = std::abs(an - fd) / std::max({1e-6, std::abs(an), std::abs(fd)});
        report.max_rel_error = std::max(report.max_rel_error, rel);
        ++report.coords_checked;
    }
    return report;
}

}  // namespace n2n
