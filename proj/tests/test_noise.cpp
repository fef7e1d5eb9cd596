#include "doctest.h"

#include "lnl/generators.hpp"
#include "lnl/noise.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace lnl;

namespace {

Dataset random_clean(std::size_t n, int dim, int32_t k, uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int32_t> label(0, k - 1);
    Dataset ds;
    ds.num_classes = k;
    ds.features = Matrix(n, static_cast<std::size_t>(dim));
    ds.labels.resize(n);
    for (std::size_t i = 0; i < ds.features.size(); ++i) ds.features.data()[i] = normal(rng);
    for (auto& y : ds.labels) y = label(rng);
    return ds;
}

}  // namespace

TEST_CASE("build_symmetric: worked examples") {
    const TransitionMatrix t = build_symmetric(10, 0.4);
    t.validate();
    for (int32_t i = 0; i < 10; ++i) {
        CHECK(t.at(i, i) == doctest::Approx(0.6).epsilon(1e-15));
        for (int32_t j = 0; j < 10; ++j) {
            if (i != j) CHECK(t.at(i, j) == doctest::Approx(0.4 / 9.0).epsilon(1e-15));
        }
    }

    const TransitionMatrix identity = build_symmetric(5, 0.0);
    for (int32_t i = 0; i < 5; ++i) {
        for (int32_t j = 0; j < 5; ++j) {
            CHECK(identity.at(i, j) == (i == j ? 1.0 : 0.0));
        }
    }

    const TransitionMatrix two = build_symmetric(2, 0.3);
    CHECK(two.at(0, 0) == doctest::Approx(0.7));
    CHECK(two.at(0, 1) == doctest::Approx(0.3));
    CHECK(two.at(1, 0) == doctest::Approx(0.3));
    CHECK(two.at(1, 1) == doctest::Approx(0.7));
}

TEST_CASE("build_pair: worked examples") {
    const TransitionMatrix t = build_pair(3, 0.4);
    t.validate();
    CHECK(t.at(0, 0) == doctest::Approx(0.6));
    CHECK(t.at(0, 1) == doctest::Approx(0.4));
    CHECK(t.at(0, 2) == 0.0);
    CHECK(t.at(1, 1) == doctest::Approx(0.6));
    CHECK(t.at(1, 2) == doctest::Approx(0.4));
    CHECK(t.at(2, 0) == doctest::Approx(0.4));
    CHECK(t.at(2, 2) == doctest::Approx(0.6));

    const TransitionMatrix identity = build_pair(4, 0.0);
    for (int32_t i = 0; i < 4; ++i) CHECK(identity.at(i, i) == 1.0);

    const TransitionMatrix ten = build_pair(10, 0.4);
    for (int32_t i = 0; i < 10; ++i) {
        int nonzero = 0;
        for (int32_t j = 0; j < 10; ++j) {
            if (ten.at(i, j) != 0.0) ++nonzero;
        }
        CHECK(nonzero == 2);
    }
}

TEST_CASE("noise parameter validation") {
    CHECK_THROWS_AS(build_symmetric(10, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_symmetric(10, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(build_pair(1, 0.2), std::invalid_argument);
}

TEST_CASE("matrix rows stay stochastic within 1e-12") {
    for (int k = 2; k <= 20; ++k) {
        for (double tau : {0.0, 0.1, 0.4, 0.8, 0.999}) {
            build_symmetric(k, tau).validate();
            build_pair(k, tau).validate();
        }
    }
}

TEST_CASE("apply_matrix_noise: identity matrix flips nothing") {
    const Dataset clean = random_clean(500, 4, 6, 1);
    const NoisyDataset noisy = apply_matrix_noise(clean, build_symmetric(6, 0.0), 9);
    noisy.validate();
    CHECK(noisy.given_labels == clean.labels);
    CHECK(noisy.noisy_count() == 0);
}

TEST_CASE("apply_matrix_noise: realized fraction concentrates near the noise ratio") {
    const Dataset clean = random_clean(100000, 2, 10, 2);
    const NoisyDataset noisy = apply_matrix_noise(clean, build_symmetric(10, 0.4), 33);
    noisy.validate();
    CHECK(noisy.realized_noise_fraction() == doctest::Approx(0.4).epsilon(0.025));
}

TEST_CASE("apply_matrix_noise: deterministic under the seed") {
    const Dataset clean = random_clean(2000, 3, 5, 3);
    const TransitionMatrix t = build_pair(5, 0.3);
    const NoisyDataset a = apply_matrix_noise(clean, t, 77);
    const NoisyDataset b = apply_matrix_noise(clean, t, 77);
    CHECK(a.given_labels == b.given_labels);
    CHECK(a.noise_mask == b.noise_mask);
    CHECK(a.features == b.features);
    const NoisyDataset c = apply_matrix_noise(clean, t, 78);
    CHECK(a.given_labels != c.given_labels);
}

TEST_CASE("apply_matrix_noise: never touches features, true labels, or order") {
    const Dataset clean = random_clean(300, 5, 4, 4);
    const NoisyDataset noisy = apply_matrix_noise(clean, build_symmetric(4, 0.5), 5);
    CHECK(noisy.features == clean.features);
    CHECK(noisy.true_labels == clean.labels);
}

TEST_CASE("apply_matrix_noise: per-class transition frequencies match the matrix row") {
    // Loose chi-square sanity at n = 100k.
    const std::size_t n = 100000;
    const int32_t k = 10;
    const Dataset clean = random_clean(n, 2, k, 6);
    const TransitionMatrix t = build_symmetric(k, 0.4);
    const NoisyDataset noisy = apply_matrix_noise(clean, t, 101);

    std::vector<std::vector<double>> counts(k, std::vector<double>(k, 0.0));
    std::vector<double> totals(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        counts[clean.labels[i]][noisy.given_labels[i]] += 1.0;
        totals[clean.labels[i]] += 1.0;
    }
    double chi2 = 0.0;
    int dof = 0;
    for (int32_t i = 0; i < k; ++i) {
        for (int32_t j = 0; j < k; ++j) {
            const double expected = totals[i] * t.at(i, j);
            if (expected < 5.0) continue;
            chi2 += (counts[i][j] - expected) * (counts[i][j] - expected) / expected;
            ++dof;
        }
        dof -= 1;  // one constraint per row
    }
    CHECK(chi2 < dof + 6.0 * std::sqrt(2.0 * dof));
}

TEST_CASE("apply_instance_noise: zero ratio flips nothing") {
    const Dataset clean = random_clean(1000, 8, 5, 7);
    const NoisyDataset noisy = apply_instance_noise(clean, 0.0, 3);
    CHECK(noisy.noisy_count() == 0);
    CHECK(noisy.given_labels == clean.labels);
}

TEST_CASE("apply_instance_noise: realized fraction lands near the target") {
    const Dataset clean = random_clean(20000, 32, 10, 8);
    const NoisyDataset noisy = apply_instance_noise(clean, 0.4, 21);
    noisy.validate();
    CHECK(noisy.realized_noise_fraction() >= 0.38);
    CHECK(noisy.realized_noise_fraction() <= 0.42);
}

TEST_CASE("apply_instance_noise: deterministic and feature-preserving") {
    const Dataset clean = random_clean(3000, 16, 8, 9);
    const NoisyDataset a = apply_instance_noise(clean, 0.3, 5);
    const NoisyDataset b = apply_instance_noise(clean, 0.3, 5);
    CHECK(a.given_labels == b.given_labels);
    CHECK(a.noise_mask == b.noise_mask);
    CHECK(a.features == clean.features);
    CHECK(a.true_labels == clean.labels);
}

TEST_CASE("instance_flip_distribution: pure function of the features") {
    Rng rng(11);
    Matrix directions(6, 12);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < directions.size(); ++i) directions.data()[i] = normal(rng);

    std::vector<double> x(12);
    for (auto& v : x) v = normal(rng);
    const double q = 0.35;
    const std::vector<double> p1 = instance_flip_distribution(x, 2, directions, q);
    const std::vector<double> p2 = instance_flip_distribution(x, 2, directions, q);
    CHECK(p1 == p2);

    // It is a proper distribution with 1-q on the true class.
    double sum = 0.0;
    for (double v : p1) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p1[2] == doctest::Approx(1.0 - q).epsilon(1e-12));
}

TEST_CASE("apply_instance_noise: rejects out-of-range labels and bad features") {
    Dataset clean = random_clean(10, 4, 3, 12);
    clean.labels[3] = 7;
    CHECK_THROWS_AS(apply_instance_noise(clean, 0.2, 1), std::invalid_argument);
    Dataset bad = random_clean(10, 4, 3, 13);
    bad.features(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(apply_instance_noise(bad, 0.2, 1), std::invalid_argument);
}
