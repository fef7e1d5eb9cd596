#include "doctest.h"

#include "lnl/losses.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace lnl;

namespace {

using Rng = std::mt19937_64;

std::vector<double> random_prob_vector(Rng& rng, std::size_t k) {
    std::uniform_real_distribution<double> unit(0.01, 1.0);
    std::vector<double> p(k);
    double sum = 0.0;
    for (double& v : p) {
        v = unit(rng);
        sum += v;
    }
    for (double& v : p) v /= sum;
    return p;
}

}  // namespace

TEST_CASE("confidence_weight: clip, direct value, self-class") {
    CHECK(confidence_weight(0.5, 1.0, 0.2) == 0.0);  // ratio 0.5 exceeds the threshold
    CHECK(confidence_weight(0.01, 0.5, 0.2) == doctest::Approx(0.18).epsilon(1e-12));
    CHECK(confidence_weight(0.3, 0.3, 0.2) == 0.0);  // ratio 1 never penalized for thresholds <= 1
}

TEST_CASE("confidence_weight: continuous at the clip point") {
    const double p_y = 0.5;
    const double threshold = 0.2;
    const double p_at_clip = threshold * p_y;
    const double eps = 1e-9;
    CHECK(confidence_weight(p_at_clip + eps, p_y, threshold) == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(confidence_weight(p_at_clip - eps, p_y, threshold) ==
          doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("second_largest_index: ties break toward the lowest index") {
    const std::vector<double> a = {0.98, 0.01, 0.01};
    CHECK(second_largest_index(a) == 1);
    const std::vector<double> b = {0.5, 0.5, 0.0};
    CHECK(second_largest_index(b) == 1);
    const std::vector<double> c = {0.1, 0.2, 0.7};
    CHECK(second_largest_index(c) == 1);
}

TEST_CASE("warmup_penalty: worked examples") {
    const double threshold = 0.2;

    // Runner-up ratio above the threshold: no penalty.
    const std::vector<double> p1 = {0.7, 0.2, 0.1};
    CHECK(warmup_penalty(p1, 0, threshold) == 0.0);

    // Overconfident prediction: penalty on the runner-up class.
    const std::vector<double> p2 = {0.98, 0.01, 0.01};
    const double a = 0.2 - 0.01 / 0.98;
    const double expected = -a * std::log(0.01);
    CHECK(warmup_penalty(p2, 0, threshold) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(warmup_penalty(p2, 0, threshold) == doctest::Approx(0.874).epsilon(1e-3));

    // Uniform output: ratio 1, no penalty.
    const std::vector<double> p3 = {0.25, 0.25, 0.25, 0.25};
    CHECK(warmup_penalty(p3, 2, threshold) == 0.0);

    CHECK(warmup_penalty(p2, 0, threshold) >= 0.0);
}

TEST_CASE("confidence_penalty: worked examples") {
    const double threshold = 0.2;

    // Every ratio clears the threshold: zero.
    const std::vector<double> p1 = {0.5, 0.3, 0.2};
    CHECK(confidence_penalty(p1, 0, threshold) == 0.0);

    // K=2 direct evaluation.
    const std::vector<double> p2 = {0.99, 0.01};
    const double a1 = 0.2 - 0.01 / 0.99;
    const double expected = 0.5 * a1 * -std::log(0.01);
    CHECK(confidence_penalty(p2, 0, threshold) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(confidence_penalty(p2, 0, threshold) == doctest::Approx(0.4372).epsilon(1e-3));

    CHECK(confidence_penalty(p2, 0, threshold) >= 0.0);
}

TEST_CASE("confidence_penalty: frozen constant weight reduces to label smoothing / K") {
    Rng rng(77);
    const double eps = 0.37;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = 2 + static_cast<std::size_t>(trial % 7);
        const std::vector<double> p = random_prob_vector(rng, k);
        const int32_t y = static_cast<int32_t>(trial % k);
        const double frozen = confidence_penalty_constant_weight(p, eps);
        const double ls_penalty = label_smoothing_loss(p, y, eps) - cross_entropy(p, y);
        CHECK(frozen == doctest::Approx(ls_penalty / static_cast<double>(k)).epsilon(1e-12));
    }
}

TEST_CASE("label_smoothing_loss: zero coefficient is plain CE") {
    Rng rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        const std::vector<double> p = random_prob_vector(rng, 5);
        const int32_t y = static_cast<int32_t>(trial % 5);
        CHECK(label_smoothing_loss(p, y, 0.0) == doctest::Approx(cross_entropy(p, y)).epsilon(1e-15));
    }
}

TEST_CASE("label_smoothing_loss: closed form on the uniform vector") {
    const std::size_t k = 6;
    const double eps = 0.3;
    const std::vector<double> p(k, 1.0 / static_cast<double>(k));
    const double expected = -std::log(1.0 / 6.0) * (1.0 + eps * 6.0);
    CHECK(label_smoothing_loss(p, 3, eps) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("label_smoothing_loss: direct evaluation") {
    const std::vector<double> p = {0.7, 0.2, 0.1};
    const double eps = 0.1;
    const double expected = -std::log(0.7) - eps * (std::log(0.7) + std::log(0.2) + std::log(0.1));
    CHECK(label_smoothing_loss(p, 0, eps) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("objective: main stage with zero weight is plain CE") {
    Rng rng(5);
    Matrix probs(8, 4);
    std::vector<int32_t> labels(8);
    for (std::size_t i = 0; i < 8; ++i) {
        const auto p = random_prob_vector(rng, 4);
        std::copy(p.begin(), p.end(), probs.row(i).begin());
        labels[i] = static_cast<int32_t>(i % 4);
    }
    LossConfig cfg;
    cfg.stage = Stage::Main;
    cfg.cr_weight = 0.0;
    const BatchLoss loss = objective(probs, labels, cfg);
    double ce = 0.0;
    for (std::size_t i = 0; i < 8; ++i) ce += cross_entropy(probs.row(i), labels[i]);
    ce /= 8.0;
    CHECK(loss.mean.total == doctest::Approx(ce).epsilon(1e-12));
}

TEST_CASE("objective: warm-up single-example worked value") {
    Matrix probs(1, 3);
    probs(0, 0) = 0.98;
    probs(0, 1) = 0.01;
    probs(0, 2) = 0.01;
    LossConfig cfg;
    cfg.stage = Stage::Warmup;
    cfg.confidence_threshold = 0.2;
    const BatchLoss loss = objective(probs, std::vector<int32_t>{0}, cfg);
    const double ce = -std::log(0.98);
    const double r = -(0.2 - 0.01 / 0.98) * std::log(0.01);
    CHECK(loss.mean.ce == doctest::Approx(ce).epsilon(1e-12));
    CHECK(loss.mean.warmup_r == doctest::Approx(r).epsilon(1e-12));
    CHECK(loss.mean.total == doctest::Approx(ce + r).epsilon(1e-12));
    CHECK(loss.mean.total == doctest::Approx(0.894).epsilon(1e-3));
}

TEST_CASE("objective: equals a naive per-example loop on a seeded batch") {
    Rng rng(32);
    const std::size_t n = 32;
    Matrix probs(n, 6);
    std::vector<int32_t> labels(n);
    std::uniform_int_distribution<int32_t> label_dist(0, 5);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = random_prob_vector(rng, 6);
        std::copy(p.begin(), p.end(), probs.row(i).begin());
        labels[i] = label_dist(rng);
    }
    LossConfig cfg;
    cfg.stage = Stage::Main;
    cfg.cr_weight = 1.0;

    // Oracle: independent accumulation straight from the definitions.
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = probs.row(i);
        total += cross_entropy(p, labels[i]) + confidence_penalty(p, labels[i], 0.2);
    }
    total /= static_cast<double>(n);

    const BatchLoss loss = objective(probs, labels, cfg);
    CHECK(loss.mean.total == doctest::Approx(total).epsilon(1e-12));
    CHECK(loss.per_example.size() == n);
}

TEST_CASE("objective: permutation equivariance over the batch") {
    Rng rng(64);
    const std::size_t n = 17;
    Matrix probs(n, 4);
    std::vector<int32_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = random_prob_vector(rng, 4);
        std::copy(p.begin(), p.end(), probs.row(i).begin());
        labels[i] = static_cast<int32_t>((i * 3) % 4);
    }
    LossConfig cfg;
    cfg.stage = Stage::Main;
    const double base = objective(probs, labels, cfg).mean.total;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    Matrix shuffled(n, 4);
    std::vector<int32_t> shuffled_labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto src = probs.row(order[i]);
        std::copy(src.begin(), src.end(), shuffled.row(i).begin());
        shuffled_labels[i] = labels[order[i]];
    }
    const double permuted = objective(shuffled, shuffled_labels, cfg).mean.total;
    CHECK(std::abs(base - permuted) <= 1e-12);
}

TEST_CASE("objective: configuration errors are rejected") {
    Matrix probs(1, 2);
    probs(0, 0) = 0.5;
    probs(0, 1) = 0.5;
    LossConfig bad;
    bad.confidence_threshold = 1.5;
    CHECK_THROWS_AS(objective(probs, std::vector<int32_t>{0}, bad), std::invalid_argument);
    LossConfig ok;
    CHECK_THROWS_AS(objective(probs, std::vector<int32_t>{0, 1}, ok), std::invalid_argument);
}

TEST_CASE("example_loss_grad: detached weight drops the weight-path terms") {
    // With the weight detached the gradient of the penalty w.r.t. p_y must
    // vanish (p_y only enters through the weight).
    const std::vector<double> p = {0.9, 0.06, 0.04};
    LossConfig cfg;
    cfg.stage = Stage::Main;
    cfg.adaptive_weight_detached = true;
    std::vector<double> grad(3, 0.0);
    example_loss_grad(p, 0, cfg, grad);
    // CE contributes -1/p_y; anything beyond that would come from the weight path.
    CHECK(grad[0] == doctest::Approx(-1.0 / 0.9).epsilon(1e-12));
}

TEST_CASE("loss components are nonnegative on random vectors") {
    Rng rng(2718);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + static_cast<std::size_t>(trial % 9);
        const std::vector<double> p = random_prob_vector(rng, k);
        const int32_t y = static_cast<int32_t>(trial % k);
        CHECK(warmup_penalty(p, y, 0.2) >= 0.0);
        CHECK(confidence_penalty(p, y, 0.2) >= 0.0);
    }
}
