#pragma once

#include "lnl/dataset.hpp"

#include <cstdint>

namespace lnl {

// Isotropic Gaussian blobs: class means are seeded random unit directions
// scaled by `separation`, covariance is the identity. Classes are balanced
// (round-robin) and the example order is shuffled once. Larger separation
// means fewer boundary examples.
Dataset make_gaussian_mixture(std::size_t n, int dim, int32_t num_classes, double separation,
                              uint64_t seed);

// Classic interleaved two-spirals problem in the plane, two classes,
// Gaussian jitter with the given std added to each point.
Dataset make_two_spirals(std::size_t n, double jitter, uint64_t seed);

}  // namespace lnl
