#include "lnl/generators.hpp"

#include "lnl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace lnl {

Dataset make_gaussian_mixture(std::size_t n, int dim, int32_t num_classes, double separation,
                              uint64_t seed) {
    if (n == 0) throw std::invalid_argument("make_gaussian_mixture: n must be positive");
    if (dim <= 0) throw std::invalid_argument("make_gaussian_mixture: dim must be positive");
    if (num_classes < 2) throw std::invalid_argument("make_gaussian_mixture: need at least two classes");
    if (separation < 0.0) throw std::invalid_argument("make_gaussian_mixture: separation must be >= 0");

    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    // Class means: random unit directions scaled to the requested norm.
    Matrix means(static_cast<std::size_t>(num_classes), static_cast<std::size_t>(dim));
    for (int32_t c = 0; c < num_classes; ++c) {
        auto m = means.row(static_cast<std::size_t>(c));
        double norm = 0.0;
        for (double& v : m) {
            v = normal(rng);
            norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) norm = 1.0;
        for (double& v : m) v *= separation / norm;
    }

    Dataset ds;
    ds.num_classes = num_classes;
    ds.features = Matrix(n, static_cast<std::size_t>(dim));
    ds.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int32_t c = static_cast<int32_t>(i % static_cast<std::size_t>(num_classes));
        ds.labels[i] = c;
        const auto m = means.row(static_cast<std::size_t>(c));
        auto x = ds.features.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = m[j] + normal(rng);
    }

    // Break the round-robin class pattern once; training reshuffles anyway.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    Dataset shuffled;
    shuffled.num_classes = num_classes;
    shuffled.features = Matrix(n, static_cast<std::size_t>(dim));
    shuffled.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto src = ds.features.row(order[i]);
        std::copy(src.begin(), src.end(), shuffled.features.row(i).begin());
        shuffled.labels[i] = ds.labels[order[i]];
    }
    return shuffled;
}

Dataset make_two_spirals(std::size_t n, double jitter, uint64_t seed) {
    if (n < 2) throw std::invalid_argument("make_two_spirals: need at least two points");
    if (jitter < 0.0) throw std::invalid_argument("make_two_spirals: jitter must be >= 0");

    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    Dataset ds;
    ds.num_classes = 2;
    ds.features = Matrix(n, 2);
    ds.labels.resize(n);
    const std::size_t per_class = n / 2;
    for (std::size_t i = 0; i < n; ++i) {
        const int32_t c = static_cast<int32_t>(i % 2);
        const std::size_t rank = i / 2;
        const double t =
            3.0 * M_PI * (static_cast<double>(rank) + 0.5) / static_cast<double>(std::max<std::size_t>(per_class, 1));
        const double r = t / (3.0 * M_PI) * 5.0 + 0.5;
        const double sign = c == 0 ? 1.0 : -1.0;
        auto x = ds.features.row(i);
        x[0] = sign * r * std::cos(t) + jitter * normal(rng);
        x[1] = sign * r * std::sin(t) + jitter * normal(rng);
        ds.labels[i] = c;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    Dataset shuffled;
    shuffled.num_classes = 2;
    shuffled.features = Matrix(n, 2);
    shuffled.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto src = ds.features.row(order[i]);
        std::copy(src.begin(), src.end(), shuffled.features.row(i).begin());
        shuffled.labels[i] = ds.labels[order[i]];
    }
    return shuffled;
}

}  // namespace lnl
