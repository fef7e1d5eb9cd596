#include "lnl/idx.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lnl {

namespace {

constexpr uint32_t kImageMagic = 0x00000803u;
constexpr uint32_t kLabelMagic = 0x00000801u;

[[noreturn]] void fail_at(const std::string& path, std::size_t offset, const std::string& what) {
    throw std::runtime_error("idx: " + what + " in " + path + " at byte " + std::to_string(offset));
}

uint32_t read_be_u32(std::ifstream& in, const std::string& path, std::size_t& offset) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) fail_at(path, offset, "truncated header");
    offset += 4;
    return (static_cast<uint32_t>(b[0]) << 24) | (static_cast<uint32_t>(b[1]) << 16) |
           (static_cast<uint32_t>(b[2]) << 8) | static_cast<uint32_t>(b[3]);
}

void write_be_u32(std::ofstream& out, uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

Matrix load_idx_images(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("idx: cannot open " + path);
    std::size_t offset = 0;
    const uint32_t magic = read_be_u32(in, path, offset);
    if (magic != kImageMagic) fail_at(path, 0, "bad image magic");
    const uint32_t count = read_be_u32(in, path, offset);
    const uint32_t rows = read_be_u32(in, path, offset);
    const uint32_t cols = read_be_u32(in, path, offset);
    const std::size_t dim = static_cast<std::size_t>(rows) * cols;
    if (dim == 0) fail_at(path, 8, "zero image dimensions");

    Matrix features(count, dim);
    std::vector<unsigned char> buf(dim);
    for (uint32_t i = 0; i < count; ++i) {
        if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(dim))) {
            fail_at(path, offset, "truncated image data");
        }
        offset += dim;
        auto row = features.row(i);
        for (std::size_t j = 0; j < dim; ++j) row[j] = static_cast<double>(buf[j]) / 255.0;
    }
    return features;
}

std::vector<int32_t> load_idx_labels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("idx: cannot open " + path);
    std::size_t offset = 0;
    const uint32_t magic = read_be_u32(in, path, offset);
    if (magic != kLabelMagic) fail_at(path, 0, "bad label magic");
    const uint32_t count = read_be_u32(in, path, offset);

    std::vector<int32_t> labels(count);
    std::vector<unsigned char> buf(count);
    if (count > 0 && !in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count))) {
        fail_at(path, offset, "truncated label data");
    }
    for (uint32_t i = 0; i < count; ++i) labels[i] = buf[i];
    return labels;
}

void write_idx_images(const Matrix& features, uint32_t rows, uint32_t cols, const std::string& path) {
    if (static_cast<std::size_t>(rows) * cols != features.cols()) {
        throw std::invalid_argument("idx: rows*cols does not match feature width");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("idx: cannot open " + path + " for writing");
    write_be_u32(out, kImageMagic);
    write_be_u32(out, static_cast<uint32_t>(features.rows()));
    write_be_u32(out, rows);
    write_be_u32(out, cols);
    std::vector<unsigned char> buf(features.cols());
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const auto row = features.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double clamped = std::clamp(row[j], 0.0, 1.0);
            buf[j] = static_cast<unsigned char>(std::lround(clamped * 255.0));
        }
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw std::runtime_error("idx: write failed: " + path);
}

void write_idx_labels(const std::vector<int32_t>& labels, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("idx: cannot open " + path + " for writing");
    write_be_u32(out, kLabelMagic);
    write_be_u32(out, static_cast<uint32_t>(labels.size()));
    for (int32_t label : labels) {
        if (label < 0 || label > 255) throw std::invalid_argument("idx: label does not fit in a byte");
        const unsigned char b = static_cast<unsigned char>(label);
        out.write(reinterpret_cast<const char*>(&b), 1);
    }
    if (!out) throw std::runtime_error("idx: write failed: " + path);
}

}  // namespace lnl
