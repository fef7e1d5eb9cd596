#pragma once

#include "lnl/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lnl {

enum class NoiseKind : uint8_t { None = 0, Symmetric = 1, Pair = 2, Instance = 3 };

const char* noise_kind_name(NoiseKind kind);
NoiseKind noise_kind_from_name(const std::string& name);

// A clean dataset: features and ground-truth labels. Example i is row i of
// the feature matrix; indices are dense 0..n-1 by construction.
struct Dataset {
    Matrix features;
    std::vector<int32_t> labels;
    int32_t num_classes = 0;

    std::size_t n() const { return labels.size(); }
};

// A dataset after label corruption. given_labels is what the trainer sees;
// true_labels and the noise mask exist only for audit and metrics.
struct NoisyDataset {
    Matrix features;
    std::vector<int32_t> true_labels;
    std::vector<int32_t> given_labels;
    std::vector<uint8_t> noise_mask;  // 1 where given != true
    int32_t num_classes = 0;
    NoiseKind kind = NoiseKind::None;
    double noise_ratio = 0.0;

    std::size_t n() const { return given_labels.size(); }
    std::size_t noisy_count() const;
    double realized_noise_fraction() const;

    // Throws std::runtime_error if the mask disagrees with the label pair or
    // any label is out of range.
    void validate() const;
};

// Wraps a clean dataset as a NoisyDataset with given == true and an all-false
// mask (used for test splits and zero-noise runs).
NoisyDataset as_noisy(const Dataset& clean);

// Columnar binary format: magic/version header, then features as
// little-endian 64-bit floats, labels as int32, mask as bytes.
void save_dataset(const NoisyDataset& ds, const std::string& path);
NoisyDataset load_dataset(const std::string& path);

// Audit CSV: index,true_label,given_label,noisy,f0..f{d-1}.
void write_audit_csv(const NoisyDataset& ds, const std::string& path);

}  // namespace lnl
