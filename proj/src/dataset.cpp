#include "lnl/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace lnl {

const char* noise_kind_name(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::None: return "none";
        case NoiseKind::Symmetric: return "symmetric";
        case NoiseKind::Pair: return "pair";
        case NoiseKind::Instance: return "instance";
    }
    return "unknown";
}

NoiseKind noise_kind_from_name(const std::string& name) {
    if (name == "none") return NoiseKind::None;
    if (name == "symmetric") return NoiseKind::Symmetric;
    if (name == "pair") return NoiseKind::Pair;
    if (name == "instance") return NoiseKind::Instance;
    throw std::invalid_argument("unknown noise kind: " + name);
}

std::size_t NoisyDataset::noisy_count() const {
    std::size_t c = 0;
    for (uint8_t m : noise_mask) c += m != 0;
    return c;
}

double NoisyDataset::realized_noise_fraction() const {
    if (noise_mask.empty()) return 0.0;
    return static_cast<double>(noisy_count()) / static_cast<double>(noise_mask.size());
}

void NoisyDataset::validate() const {
    const std::size_t count = n();
    if (true_labels.size() != count || noise_mask.size() != count || features.rows() != count) {
        throw std::runtime_error("NoisyDataset: column lengths disagree");
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (given_labels[i] < 0 || given_labels[i] >= num_classes ||
            true_labels[i] < 0 || true_labels[i] >= num_classes) {
            throw std::runtime_error("NoisyDataset: label out of range at index " + std::to_string(i));
        }
        const bool flipped = given_labels[i] != true_labels[i];
        if (flipped != (noise_mask[i] != 0)) {
            throw std::runtime_error("NoisyDataset: mask inconsistent at index " + std::to_string(i));
        }
    }
}

NoisyDataset as_noisy(const Dataset& clean) {
    NoisyDataset out;
    out.features = clean.features;
    out.true_labels = clean.labels;
    out.given_labels = clean.labels;
    out.noise_mask.assign(clean.n(), 0);
    out.num_classes = clean.num_classes;
    out.kind = NoiseKind::None;
    out.noise_ratio = 0.0;
    return out;
}

namespace {

constexpr uint32_t kDatasetMagic = 0x444C4E4Cu;  // "LNLD" little-endian
constexpr uint32_t kDatasetVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
        throw std::runtime_error("dataset file truncated: " + path);
    }
    return v;
}

}  // namespace

void save_dataset(const NoisyDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open dataset for writing: " + path);
    write_pod(out, kDatasetMagic);
    write_pod(out, kDatasetVersion);
    write_pod(out, static_cast<uint64_t>(ds.n()));
    write_pod(out, static_cast<uint64_t>(ds.features.cols()));
    write_pod(out, ds.num_classes);
    write_pod(out, static_cast<uint8_t>(ds.kind));
    write_pod(out, ds.noise_ratio);
    out.write(reinterpret_cast<const char*>(ds.features.data()),
              static_cast<std::streamsize>(ds.features.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(ds.true_labels.data()),
              static_cast<std::streamsize>(ds.true_labels.size() * sizeof(int32_t)));
    out.write(reinterpret_cast<const char*>(ds.given_labels.data()),
              static_cast<std::streamsize>(ds.given_labels.size() * sizeof(int32_t)));
    out.write(reinterpret_cast<const char*>(ds.noise_mask.data()),
              static_cast<std::streamsize>(ds.noise_mask.size()));
    if (!out) throw std::runtime_error("dataset write failed: " + path);
}

NoisyDataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);
    if (read_pod<uint32_t>(in, path) != kDatasetMagic) {
        throw std::runtime_error("bad dataset magic: " + path);
    }
    if (read_pod<uint32_t>(in, path) != kDatasetVersion) {
        throw std::runtime_error("unsupported dataset version: " + path);
    }
    const uint64_t n = read_pod<uint64_t>(in, path);
    const uint64_t d = read_pod<uint64_t>(in, path);
    NoisyDataset ds;
    ds.num_classes = read_pod<int32_t>(in, path);
    ds.kind = static_cast<NoiseKind>(read_pod<uint8_t>(in, path));
    ds.noise_ratio = read_pod<double>(in, path);
    ds.features = Matrix(n, d);
    ds.true_labels.resize(n);
    ds.given_labels.resize(n);
    ds.noise_mask.resize(n);
    if (!in.read(reinterpret_cast<char*>(ds.features.data()),
                 static_cast<std::streamsize>(ds.features.size() * sizeof(double))) ||
        !in.read(reinterpret_cast<char*>(ds.true_labels.data()),
                 static_cast<std::streamsize>(n * sizeof(int32_t))) ||
        !in.read(reinterpret_cast<char*>(ds.given_labels.data()),
                 static_cast<std::streamsize>(n * sizeof(int32_t))) ||
        !in.read(reinterpret_cast<char*>(ds.noise_mask.data()), static_cast<std::streamsize>(n))) {
        throw std::runtime_error("dataset file truncated: " + path);
    }
    ds.validate();
    return ds;
}

void write_audit_csv(const NoisyDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open audit csv for writing: " + path);
    out << "index,true_label,given_label,noisy";
    for (std::size_t j = 0; j < ds.features.cols(); ++j) out << ",f" << j;
    out << "\n";
    char buf[32];
    for (std::size_t i = 0; i < ds.n(); ++i) {
        out << i << ',' << ds.true_labels[i] << ',' << ds.given_labels[i] << ','
            << static_cast<int>(ds.noise_mask[i]);
        const auto row = ds.features.row(i);
        for (double v : row) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ',' << buf;
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("audit csv write failed: " + path);
}

}  // namespace lnl
