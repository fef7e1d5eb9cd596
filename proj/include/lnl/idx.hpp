#pragma once

#include "lnl/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lnl {

// IDX tensor files (the MNIST container format): big-endian u32 dimensions
// behind a magic of 0x00000803 for u8 image tensors and 0x00000801 for u8
// label vectors. Decode errors report the byte offset.

// Rows are flattened images scaled to [0,1].
Matrix load_idx_images(const std::string& path);
std::vector<int32_t> load_idx_labels(const std::string& path);

// Encoders for fixtures and exports. Features are clamped to [0,1] and
// quantized to bytes; dims must multiply out to the matrix shape.
void write_idx_images(const Matrix& features, uint32_t rows, uint32_t cols, const std::string& path);
void write_idx_labels(const std::vector<int32_t>& labels, const std::string& path);

}  // namespace lnl
