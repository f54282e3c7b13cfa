// Encoder forward/backward, initialization, dropout behaviour and the Adam
// update. The backward pass is checked against central finite differences on
// a scalar probe loss; the forward pass against a by-hand evaluation of a
// fixed small network.

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "n2n/mlp.hpp"
#include "n2n/rng.hpp"

using namespace n2n;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
    Matrix m(r, c);
    for (auto& v : m.data) v = rng.normal();
    return m;
}

/// Scalar probe: sum of c_h * h + c_l * logits with fixed per-entry weights.
/// Linear in the outputs, so its exact gradient flows are easy to feed into
/// backward and cheap to difference numerically.
double probe_loss(const MlpParams& p, const Matrix& x, const Matrix& wh, const Matrix& wl,
                  double l2) {
    const ForwardCache c = forward(p, x, 0.0, ForwardMode::Eval);
    double loss = 0.0;
    for (std::size_t i = 0; i < c.h.size(); ++i) loss += wh.data[i] * c.h.data[i];
    for (std::size_t i = 0; i < c.logits.size(); ++i) loss += wl.data[i] * c.logits.data[i];
    return loss + l2 * weight_squared_norm(p);
}

struct TensorRef {
    double* value;
    const double* grad;
};

std::vector<TensorRef> flatten(MlpParams& p, const MlpGrads& g) {
    std::vector<TensorRef> out;
    const auto add_mat = [&](Matrix& m, const Matrix& gm) {
        for (std::size_t i = 0; i < m.size(); ++i) out.push_back({&m.data[i], &gm.data[i]});
    };
    const auto add_vec = [&](std::vector<double>& v, const std::vector<double>& gv) {
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back({&v[i], &gv[i]});
    };
    add_mat(p.w1, g.w1);
    add_vec(p.b1, g.b1);
    add_mat(p.w2, g.w2);
    add_vec(p.b2, g.b2);
    add_mat(p.whead, g.whead);
    add_vec(p.bhead, g.bhead);
    return out;
}

}  // namespace

TEST_CASE("init_params is deterministic with Glorot bounds and zero biases") {
    const MlpParams a = init_params(20, 16, 4, Arch::TwoHiddenPlusHead, 42);
    const MlpParams b = init_params(20, 16, 4, Arch::TwoHiddenPlusHead, 42);
    const MlpParams c = init_params(20, 16, 4, Arch::TwoHiddenPlusHead, 43);

    CHECK(a.w1.data == b.w1.data);
    CHECK(a.w2.data == b.w2.data);
    CHECK(a.whead.data == b.whead.data);
    CHECK(a.w1.data != c.w1.data);

    CHECK(a.w1.rows == 20);
    CHECK(a.w1.cols == 16);
    CHECK(a.w2.rows == 16);
    CHECK(a.whead.cols == 4);
    for (const double v : a.b1) CHECK(v == 0.0);
    for (const double v : a.b2) CHECK(v == 0.0);
    for (const double v : a.bhead) CHECK(v == 0.0);

    const double bound1 = std::sqrt(6.0 / (20 + 16));
    for (const double v : a.w1.data) {
        CHECK(std::abs(v) <= bound1);
        CHECK(v != 0.0);  // draws from the open interval, collisions at 0 are ~impossible
    }
    const double bound_head = std::sqrt(6.0 / (16 + 4));
    for (const double v : a.whead.data) CHECK(std::abs(v) <= bound_head);
}

TEST_CASE("single-hidden arch leaves the second layer empty") {
    const MlpParams p = init_params(10, 8, 3, Arch::HiddenPlusClassifier, 1);
    CHECK(p.w2.size() == 0);
    CHECK(p.b2.empty());
    CHECK(p.hidden_dim() == 8);
    CHECK(p.num_classes() == 3);
}

TEST_CASE("arch string conversions round-trip") {
    CHECK(arch_from_string("two_hidden_plus_head") == Arch::TwoHiddenPlusHead);
    CHECK(arch_from_string("hidden_plus_classifier") == Arch::HiddenPlusClassifier);
    CHECK(to_string(Arch::TwoHiddenPlusHead) == "two_hidden_plus_head");
    CHECK(arch_from_string(to_string(Arch::HiddenPlusClassifier)) == Arch::HiddenPlusClassifier);
    CHECK_THROWS_AS(arch_from_string("resnet"), std::invalid_argument);
}

TEST_CASE("forward reproduces a hand-computed two-layer network") {
    // 1 input of dimension 2, hidden 2, classes 1; weights chosen so every
    // intermediate is easy to track, including a ReLU clamp in layer 1.
    MlpParams p;
    p.arch = Arch::TwoHiddenPlusHead;
    p.w1 = Matrix(2, 2);
    p.w1(0, 0) = 1.0; p.w1(0, 1) = -1.0;
    p.w1(1, 0) = 0.5; p.w1(1, 1) = 2.0;
    p.b1 = {0.25, -0.25};
    p.w2 = Matrix(2, 2);
    p.w2(0, 0) = 1.0; p.w2(0, 1) = 2.0;
    p.w2(1, 0) = -1.0; p.w2(1, 1) = 0.5;
    p.b2 = {0.0, 0.1};
    p.whead = Matrix(2, 1);
    p.whead(0, 0) = 3.0;
    p.whead(1, 0) = -2.0;
    p.bhead = {0.5};

    Matrix x(1, 2);
    x(0, 0) = 1.0;
    x(0, 1) = -2.0;

    // z1 = x W1 + b1 = (1*1 + -2*0.5 + 0.25, 1*-1 + -2*2 - 0.25) = (0.25, -5.25)
    // a1 = (0.25, 0); z2 = a1 W2 + b2 = (0.25, 0.6); h = (0.25, 0.6)
    // logits = 0.25*3 - 0.6*2 + 0.5 = 0.05
    const ForwardCache c = forward(p, x, 0.0, ForwardMode::Eval);
    CHECK(c.z1(0, 0) == doctest::Approx(0.25));
    CHECK(c.z1(0, 1) == doctest::Approx(-5.25));
    CHECK(c.dropped_a1(0, 1) == 0.0);  // clamped by ReLU
    CHECK(c.h(0, 0) == doctest::Approx(0.25));
    CHECK(c.h(0, 1) == doctest::Approx(0.6));
    CHECK(c.logits(0, 0) == doctest::Approx(0.05));
}

TEST_CASE("eval mode ignores dropout and train mode with rate zero matches it") {
    Rng rng(3);
    const Matrix x = random_matrix(6, 5, rng);
    const MlpParams p = init_params(5, 7, 3, Arch::TwoHiddenPlusHead, 9);

    const ForwardCache eval = forward(p, x, 0.9, ForwardMode::Eval);
    const ForwardCache train0 = forward(p, x, 0.0, ForwardMode::Train, 123);
    CHECK(eval.h.data == train0.h.data);
    CHECK(eval.logits.data == train0.logits.data);
    CHECK(eval.mask0.size() == 0);
}

TEST_CASE("train-mode dropout masks hold zero or the inverse keep rate") {
    Rng rng(4);
    const Matrix x = random_matrix(50, 10, rng);
    const MlpParams p = init_params(10, 8, 3, Arch::TwoHiddenPlusHead, 2);
    const double rate = 0.4;

    const ForwardCache a = forward(p, x, rate, ForwardMode::Train, 77);
    const ForwardCache b = forward(p, x, rate, ForwardMode::Train, 77);
    const ForwardCache c = forward(p, x, rate, ForwardMode::Train, 78);
    CHECK(a.h.data == b.h.data);   // same dropout seed, same masks
    CHECK(a.h.data != c.h.data);   // different seed, different masks

    const double inv_keep = 1.0 / (1.0 - rate);
    std::size_t zeros = 0;
    for (const double v : a.mask0.data) {
        const bool valid = v == 0.0 || v == doctest::Approx(inv_keep);
        CHECK(valid);
        zeros += v == 0.0;
    }
    // 500 Bernoulli(0.4) draws: expect ~200 zeros, allow a wide band.
    CHECK(zeros > 120);
    CHECK(zeros < 280);

    // Dropped input actually applies the mask.
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(a.dropped_input.data[i] == doctest::Approx(x.data[i] * a.mask0.data[i]));
    }
}

TEST_CASE("inverted dropout is unbiased in expectation") {
    Matrix x(1, 1000, 1.0);
    const MlpParams p = init_params(1000, 4, 2, Arch::TwoHiddenPlusHead, 5);
    const double rate = 0.6;
    double mean = 0.0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        const ForwardCache c = forward(p, x, rate, ForwardMode::Train, 1000 + t);
        double s = 0.0;
        for (const double v : c.dropped_input.data) s += v;
        mean += s / static_cast<double>(x.size());
    }
    mean /= trials;
    CHECK(mean == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("backward matches central finite differences") {
    Rng rng(11);
    const Matrix x = random_matrix(5, 4, rng);

    const auto check_arch = [&](Arch arch) {
        MlpParams p = init_params(4, 3, 2, arch, 21);
        // Zero-initialized biases can leave pre-activations exactly on the
        // ReLU kink (a fully dead layer-1 row makes z2 = b2 = 0), where
        // central differences straddle the corner and disagree with any
        // subgradient choice. Nudge the biases off zero first.
        for (auto& v : p.b1) v = 0.05 * rng.normal();
        for (auto& v : p.b2) v = 0.05 * rng.normal();
        for (auto& v : p.bhead) v = 0.05 * rng.normal();
        const Matrix wh = random_matrix(5, 3, rng);
        const Matrix wl = random_matrix(5, 2, rng);
        const double l2 = 0.01;

        const ForwardCache cache = forward(p, x, 0.0, ForwardMode::Eval);
        const MlpGrads grads = backward(p, cache, wh, wl, l2);

        MlpParams pert = p;
        auto refs = flatten(pert, grads);
        const double eps = 1e-6;
        for (const TensorRef& r : refs) {
            const double orig = *r.value;
            *r.value = orig + eps;
            const double up = probe_loss(pert, x, wh, wl, l2);
            *r.value = orig - eps;
            const double down = probe_loss(pert, x, wh, wl, l2);
            *r.value = orig;
            const double fd = (up - down) / (2 * eps);
            CHECK(*r.grad == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
        }
    };
    check_arch(Arch::TwoHiddenPlusHead);
    check_arch(Arch::HiddenPlusClassifier);
}

TEST_CASE("backward routes gradients through train-mode dropout masks") {
    Rng rng(13);
    const Matrix x = random_matrix(4, 6, rng);
    MlpParams p = init_params(6, 5, 2, Arch::TwoHiddenPlusHead, 31);
    // Keep pre-activations off the exact ReLU kink (see the eval-mode test).
    for (auto& v : p.b1) v = 0.05 * rng.normal();
    for (auto& v : p.b2) v = 0.05 * rng.normal();
    const Matrix wh = random_matrix(4, 5, rng);
    const Matrix wl = random_matrix(4, 2, rng);

    const ForwardCache cache = forward(p, x, 0.5, ForwardMode::Train, 919);
    const MlpGrads grads = backward(p, cache, wh, wl, 0.0);

    // Finite-difference the same fixed-mask network by re-running forward
    // with the identical dropout seed.
    const auto loss_at = [&](MlpParams& q) {
        const ForwardCache c = forward(q, x, 0.5, ForwardMode::Train, 919);
        double loss = 0.0;
        for (std::size_t i = 0; i < c.h.size(); ++i) loss += wh.data[i] * c.h.data[i];
        for (std::size_t i = 0; i < c.logits.size(); ++i) loss += wl.data[i] * c.logits.data[i];
        return loss;
    };
    MlpParams pert = p;
    auto refs = flatten(pert, grads);
    const double eps = 1e-6;
    for (std::size_t k = 0; k < refs.size(); k += 7) {  // sample coordinates
        const TensorRef& r = refs[k];
        const double orig = *r.value;
        *r.value = orig + eps;
        const double up = loss_at(pert);
        *r.value = orig - eps;
        const double down = loss_at(pert);
        *r.value = orig;
        CHECK(*r.grad == doctest::Approx((up - down) / (2 * eps)).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("l2 contributes 2*l2*W to weight gradients and nothing to biases") {
    Rng rng(17);
    const Matrix x = random_matrix(3, 4, rng);
    const MlpParams p = init_params(4, 3, 2, Arch::TwoHiddenPlusHead, 8);
    const ForwardCache cache = forward(p, x, 0.0, ForwardMode::Eval);

    const Matrix zero_h(3, 3);
    const Matrix zero_l(3, 2);
    const double l2 = 0.05;
    const MlpGrads grads = backward(p, cache, zero_h, zero_l, l2);

    for (std::size_t i = 0; i < p.w1.size(); ++i) {
        CHECK(grads.w1.data[i] == doctest::Approx(2 * l2 * p.w1.data[i]));
    }
    for (std::size_t i = 0; i < p.whead.size(); ++i) {
        CHECK(grads.whead.data[i] == doctest::Approx(2 * l2 * p.whead.data[i]));
    }
    for (const double v : grads.b1) CHECK(v == 0.0);
    for (const double v : grads.bhead) CHECK(v == 0.0);
}

TEST_CASE("weight_squared_norm can exclude the head") {
    const MlpParams p = init_params(4, 3, 2, Arch::TwoHiddenPlusHead, 6);
    double manual = 0.0;
    for (const double v : p.w1.data) manual += v * v;
    for (const double v : p.w2.data) manual += v * v;
    double head = 0.0;
    for (const double v : p.whead.data) head += v * v;

    CHECK(weight_squared_norm(p, false) == doctest::Approx(manual));
    CHECK(weight_squared_norm(p, true) == doctest::Approx(manual + head));
}

TEST_CASE("adam identities") {
    Rng rng(23);
    const Matrix x = random_matrix(3, 4, rng);
    MlpParams p = init_params(4, 3, 2, Arch::TwoHiddenPlusHead, 12);
    const ForwardCache cache = forward(p, x, 0.0, ForwardMode::Eval);
    const Matrix wh = random_matrix(3, 3, rng);
    const Matrix wl = random_matrix(3, 2, rng);
    const MlpGrads grads = backward(p, cache, wh, wl, 0.0);

    SUBCASE("zero learning rate leaves parameters untouched") {
        const MlpParams before = p;
        AdamState s = init_adam(p);
        adam_step(p, grads, s, 0.0);
        CHECK(p.w1.data == before.w1.data);
        CHECK(p.whead.data == before.whead.data);
        CHECK(p.b1 == before.b1);
        CHECK(s.step == 1);  // the step counter still advances
    }

    SUBCASE("zero gradients leave parameters untouched") {
        const MlpParams before = p;
        MlpGrads zeros = grads;
        zeros.w1.fill(0.0);
        zeros.w2.fill(0.0);
        zeros.whead.fill(0.0);
        std::fill(zeros.b1.begin(), zeros.b1.end(), 0.0);
        std::fill(zeros.b2.begin(), zeros.b2.end(), 0.0);
        std::fill(zeros.bhead.begin(), zeros.bhead.end(), 0.0);
        AdamState s = init_adam(p);
        adam_step(p, zeros, s, 0.1);
        CHECK(p.w1.data == before.w1.data);
        CHECK(p.b1 == before.b1);
    }

    SUBCASE("first step moves each coordinate by about lr against the gradient") {
        // With bias correction the first update is lr * g / (|g| + eps).
        const MlpParams before = p;
        AdamState s = init_adam(p);
        const double lr = 0.01;
        adam_step(p, grads, s, lr);
        for (std::size_t i = 0; i < p.w1.size(); ++i) {
            const double g = grads.w1.data[i];
            if (std::abs(g) < 1e-12) continue;
            const double moved = p.w1.data[i] - before.w1.data[i];
            CHECK(moved == doctest::Approx(-lr * g / (std::abs(g) + 1e-8)).epsilon(1e-9));
        }
    }

    SUBCASE("frozen head never moves") {
        const MlpParams before = p;
        AdamState s = init_adam(p);
        adam_step(p, grads, s, 0.05, false);
        adam_step(p, grads, s, 0.05, false);
        CHECK(p.whead.data == before.whead.data);
        CHECK(p.bhead == before.bhead);
        CHECK(p.w1.data != before.w1.data);  // the encoder does move
    }
}
