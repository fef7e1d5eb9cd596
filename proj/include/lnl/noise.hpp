#pragma once

#include "lnl/dataset.hpp"
#include "lnl/matrix.hpp"
#include "lnl/model.hpp"

#include <cstdint>
#include <span>

namespace lnl {

// Row-stochastic K x K label-corruption matrix: entry (i, j) is the
// probability that true class i is observed as class j.
struct TransitionMatrix {
    int32_t num_classes = 0;
    double noise_ratio = 0.0;
    NoiseKind kind = NoiseKind::None;
    Matrix p;  // num_classes x num_classes

    double at(int32_t i, int32_t j) const { return p(static_cast<std::size_t>(i), static_cast<std::size_t>(j)); }

    // Rows must sum to 1 within 1e-12 with every entry in [0,1].
    void validate() const;
};

// Diagonal 1-tau, every off-diagonal tau/(K-1).
TransitionMatrix build_symmetric(int32_t num_classes, double noise_ratio);

// Diagonal 1-tau, mass tau on the cyclic successor (i+1) mod K.
TransitionMatrix build_pair(int32_t num_classes, double noise_ratio);

// Draws each given label independently from the row of its true label.
// Features and indices are untouched; the mask records realized flips.
NoisyDataset apply_matrix_noise(const Dataset& clean, const TransitionMatrix& t, uint64_t seed);

// Feature-dependent corruption: per-example flip probability drawn from a
// normal centered at noise_ratio (std 0.1) truncated to [0,1], corruption
// direction from projecting the features onto seeded random class vectors.
// noise_ratio == 0 flips nothing.
NoisyDataset apply_instance_noise(const Dataset& clean, double noise_ratio, uint64_t seed);

// The per-example label distribution used by apply_instance_noise: softmax
// of x . directions over the wrong classes scaled by flip_prob, with
// 1 - flip_prob on the true class. Pure in its inputs; exposed so tests can
// pin the instance-dependence contract.
std::vector<double> instance_flip_distribution(std::span<const double> x, int32_t true_label,
                                               const Matrix& directions, double flip_prob);

}  // namespace lnl
