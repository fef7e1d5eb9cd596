#include "lnl/noise.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace lnl {

void TransitionMatrix::validate() const {
    if (num_classes < 2) throw std::invalid_argument("TransitionMatrix: need at least two classes");
    if (p.rows() != static_cast<std::size_t>(num_classes) || p.cols() != p.rows()) {
        throw std::invalid_argument("TransitionMatrix: shape mismatch");
    }
    for (int32_t i = 0; i < num_classes; ++i) {
        double sum = 0.0;
        for (int32_t j = 0; j < num_classes; ++j) {
            const double v = at(i, j);
            if (v < 0.0 || v > 1.0) throw std::invalid_argument("TransitionMatrix: entry outside [0,1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            throw std::invalid_argument("TransitionMatrix: row does not sum to 1");
        }
    }
}

namespace {

void check_noise_params(int32_t num_classes, double noise_ratio) {
    if (num_classes < 2) throw std::invalid_argument("noise: need at least two classes");
    if (noise_ratio < 0.0 || noise_ratio >= 1.0) {
        throw std::invalid_argument("noise: noise_ratio must be in [0, 1)");
    }
}

}  // namespace

TransitionMatrix build_symmetric(int32_t num_classes, double noise_ratio) {
    check_noise_params(num_classes, noise_ratio);
    TransitionMatrix t;
    t.num_classes = num_classes;
    t.noise_ratio = noise_ratio;
    t.kind = NoiseKind::Symmetric;
    t.p = Matrix(num_classes, num_classes, noise_ratio / static_cast<double>(num_classes - 1));
    for (int32_t i = 0; i < num_classes; ++i) {
        t.p(i, i) = 1.0 - noise_ratio;
    }
    return t;
}

TransitionMatrix build_pair(int32_t num_classes, double noise_ratio) {
    check_noise_params(num_classes, noise_ratio);
    TransitionMatrix t;
    t.num_classes = num_classes;
    t.noise_ratio = noise_ratio;
    t.kind = NoiseKind::Pair;
    t.p = Matrix(num_classes, num_classes, 0.0);
    for (int32_t i = 0; i < num_classes; ++i) {
        t.p(i, i) = 1.0 - noise_ratio;
        t.p(i, (i + 1) % num_classes) = noise_ratio;
    }
    return t;
}

namespace {

// Single uniform draw walked through the cumulative distribution. The last
// class absorbs any floating-point remainder.
int32_t sample_categorical(std::span<const double> probs, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    double cum = 0.0;
    for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
        cum += probs[k];
        if (u < cum) return static_cast<int32_t>(k);
    }
    return static_cast<int32_t>(probs.size() - 1);
}

void check_labels_in_range(const Dataset& clean, int32_t num_classes) {
    for (std::size_t i = 0; i < clean.n(); ++i) {
        if (clean.labels[i] < 0 || clean.labels[i] >= num_classes) {
            throw std::invalid_argument("noise: label out of range at index " + std::to_string(i));
        }
    }
}

}  // namespace

NoisyDataset apply_matrix_noise(const Dataset& clean, const TransitionMatrix& t, uint64_t seed) {
    t.validate();
    if (clean.num_classes != t.num_classes) {
        throw std::invalid_argument("noise: dataset class count does not match transition matrix");
    }
    check_labels_in_range(clean, t.num_classes);

    NoisyDataset out = as_noisy(clean);
    out.kind = t.kind;
    out.noise_ratio = t.noise_ratio;
    Rng rng(seed);
    for (std::size_t i = 0; i < clean.n(); ++i) {
        const int32_t y = clean.labels[i];
        const int32_t drawn = sample_categorical(t.p.row(static_cast<std::size_t>(y)), rng);
        out.given_labels[i] = drawn;
        out.noise_mask[i] = drawn != y ? 1 : 0;
    }
    return out;
}

std::vector<double> instance_flip_distribution(std::span<const double> x, int32_t true_label,
                                               const Matrix& directions, double flip_prob) {
    const std::size_t num_classes = directions.rows();
    if (true_label < 0 || static_cast<std::size_t>(true_label) >= num_classes) {
        throw std::invalid_argument("instance noise: label out of range");
    }
    if (x.size() != directions.cols()) {
        throw std::invalid_argument("instance noise: feature width does not match directions");
    }
    // Wrong-class logits from feature projections, softmax over wrong classes
    // only, scaled by the flip probability.
    std::vector<double> logits(num_classes, 0.0);
    double max_logit = -1e300;
    for (std::size_t k = 0; k < num_classes; ++k) {
        if (static_cast<int32_t>(k) == true_label) continue;
        const auto w = directions.row(k);
        double dot = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) dot += x[j] * w[j];
        logits[k] = dot;
        max_logit = std::max(max_logit, dot);
    }
    std::vector<double> probs(num_classes, 0.0);
    double sum = 0.0;
    for (std::size_t k = 0; k < num_classes; ++k) {
        if (static_cast<int32_t>(k) == true_label) continue;
        probs[k] = std::exp(logits[k] - max_logit);
        sum += probs[k];
    }
    for (std::size_t k = 0; k < num_classes; ++k) {
        if (static_cast<int32_t>(k) == true_label) {
            probs[k] = 1.0 - flip_prob;
        } else {
            probs[k] *= flip_prob / sum;
        }
    }
    return probs;
}

NoisyDataset apply_instance_noise(const Dataset& clean, double noise_ratio, uint64_t seed) {
    check_noise_params(clean.num_classes, noise_ratio);
    check_labels_in_range(clean, clean.num_classes);
    if (!all_finite(clean.features)) {
        throw std::invalid_argument("instance noise: non-finite features");
    }

    NoisyDataset out = as_noisy(clean);
    out.kind = NoiseKind::Instance;
    out.noise_ratio = noise_ratio;
    if (noise_ratio == 0.0) return out;

    Rng rng(seed);

    // Random per-class projection directions, one row per class.
    Matrix directions(static_cast<std::size_t>(clean.num_classes), clean.features.cols());
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    for (std::size_t i = 0; i < directions.size(); ++i) {
        directions.data()[i] = unit_normal(rng);
    }

    // Per-example flip probability: normal centered at the noise ratio with
    // std 0.1, truncated to [0,1] by rejection.
    std::normal_distribution<double> flip_dist(noise_ratio, 0.1);
    for (std::size_t i = 0; i < clean.n(); ++i) {
        double q = flip_dist(rng);
        while (q < 0.0 || q > 1.0) q = flip_dist(rng);
        const std::vector<double> probs =
            instance_flip_distribution(clean.features.row(i), clean.labels[i], directions, q);
        const int32_t drawn = sample_categorical(probs, rng);
        out.given_labels[i] = drawn;
        out.noise_mask[i] = drawn != clean.labels[i] ? 1 : 0;
    }
    return out;
}

}  // namespace lnl
