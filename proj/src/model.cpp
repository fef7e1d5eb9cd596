#include "lnl/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace lnl {

void OptimizerConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("OptimizerConfig.learning_rate must be > 0");
    if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("OptimizerConfig.momentum must be in [0, 1)");
    if (weight_decay < 0.0) throw std::invalid_argument("OptimizerConfig.weight_decay must be >= 0");
    if (lr_decay_epoch <= 0) throw std::invalid_argument("OptimizerConfig.lr_decay_epoch must be > 0");
    if (!(lr_decay_factor > 0.0)) throw std::invalid_argument("OptimizerConfig.lr_decay_factor must be > 0");
    if (batch_size <= 0) throw std::invalid_argument("OptimizerConfig.batch_size must be > 0");
}

double effective_learning_rate(const OptimizerConfig& cfg, int epoch) {
    const int milestones_passed = (epoch >= cfg.lr_decay_epoch) ? 1 : 0;
    return cfg.learning_rate / std::pow(cfg.lr_decay_factor, milestones_passed);
}

ModelState::ModelState(const std::vector<int>& widths, Rng& rng) : widths_(widths) {
    if (widths.size() < 2) {
        throw std::invalid_argument("ModelState: need at least input and output widths");
    }
    for (int w : widths) {
        if (w <= 0) throw std::invalid_argument("ModelState: widths must be positive");
    }
    if (widths.back() < 2) {
        throw std::invalid_argument("ModelState: output width (number of classes) must be >= 2");
    }
    layers_.reserve(widths.size() - 1);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const std::size_t fan_in = static_cast<std::size_t>(widths[l]);
        const std::size_t fan_out = static_cast<std::size_t>(widths[l + 1]);
        Layer layer;
        layer.weight = Matrix(fan_out, fan_in);
        layer.bias.assign(fan_out, 0.0);
        layer.weight_vel = Matrix(fan_out, fan_in);
        layer.bias_vel.assign(fan_out, 0.0);
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (std::size_t i = 0; i < layer.weight.size(); ++i) {
            layer.weight.data()[i] = dist(rng);
        }
        layers_.push_back(std::move(layer));
    }
}

namespace {

// out = batch . weight^T + bias, with weight stored out_dim x in_dim.
Matrix affine(const Matrix& batch, const Matrix& weight, const std::vector<double>& bias) {
    const std::size_t n = batch.rows();
    const std::size_t out_dim = weight.rows();
    Matrix out(n, out_dim);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = batch.row(i);
        auto o = out.row(i);
        for (std::size_t j = 0; j < out_dim; ++j) {
            const auto w = weight.row(j);
            double acc = bias[j];
            for (std::size_t k = 0; k < w.size(); ++k) acc += x[k] * w[k];
            o[j] = acc;
        }
    }
    return out;
}

void relu_inplace(Matrix& m) {
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.data()[i] < 0.0) m.data()[i] = 0.0;
    }
}

void softmax_rows_inplace(Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        double mx = r[0];
        for (double v : r) mx = std::max(mx, v);
        double sum = 0.0;
        for (double& v : r) {
            v = std::exp(v - mx);
            sum += v;
        }
        for (double& v : r) v /= sum;
    }
}

void check_forward_input(const ModelState& model, const Matrix& batch) {
    if (model.layers().empty()) throw std::invalid_argument("forward: uninitialized model");
    if (batch.cols() != static_cast<std::size_t>(model.input_dim())) {
        throw std::invalid_argument("forward: batch feature width does not match model input width");
    }
    if (!all_finite(batch)) {
        throw std::invalid_argument("forward: non-finite input feature");
    }
}

// Pre-activations of every layer; the last entry holds the logits.
std::vector<Matrix> forward_preacts(const ModelState& model, const Matrix& batch) {
    std::vector<Matrix> pre;
    pre.reserve(model.layers().size());
    const Matrix* input = &batch;
    Matrix activated;
    for (std::size_t l = 0; l < model.layers().size(); ++l) {
        Matrix z = affine(*input, model.layers()[l].weight, model.layers()[l].bias);
        pre.push_back(std::move(z));
        if (l + 1 < model.layers().size()) {
            activated = pre.back();
            relu_inplace(activated);
            input = &activated;
        }
    }
    return pre;
}

}  // namespace

Matrix forward(const ModelState& model, const Matrix& batch) {
    check_forward_input(model, batch);
    std::vector<Matrix> pre = forward_preacts(model, batch);
    Matrix probs = std::move(pre.back());
    softmax_rows_inplace(probs);
    return probs;
}

std::vector<int32_t> predict(const ModelState& model, const Matrix& batch) {
    const Matrix probs = forward(model, batch);
    std::vector<int32_t> labels(probs.rows());
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        const auto r = probs.row(i);
        std::size_t best = 0;
        for (std::size_t c = 1; c < r.size(); ++c) {
            if (r[c] > r[best]) best = c;
        }
        labels[i] = static_cast<int32_t>(best);
    }
    return labels;
}

BackwardResult backward(const ModelState& model, const Matrix& batch,
                        std::span<const int32_t> labels, const LossConfig& loss_cfg) {
    check_forward_input(model, batch);
    loss_cfg.validate();
    const std::size_t n = batch.rows();
    if (labels.size() != n) {
        throw std::invalid_argument("backward: labels do not align with batch rows");
    }
    if (n == 0) throw std::invalid_argument("backward: empty batch");

    const auto& layers = model.layers();
    const std::size_t num_layers = layers.size();

    // Forward with caches. activations[l] is the input of layer l.
    std::vector<Matrix> pre = forward_preacts(model, batch);
    std::vector<Matrix> activations;
    activations.reserve(num_layers);
    activations.push_back(batch);
    for (std::size_t l = 0; l + 1 < num_layers; ++l) {
        Matrix a = pre[l];
        relu_inplace(a);
        activations.push_back(std::move(a));
    }
    Matrix probs = pre.back();
    softmax_rows_inplace(probs);

    // Logit-space error: delta_i = p_i * (g_i - <g, p>) with g = d(loss)/dp,
    // scaled by 1/n for the batch mean.
    const std::size_t num_classes = probs.cols();
    Matrix delta(n, num_classes);
    std::vector<double> grad_p(num_classes);
    LossBreakdown mean_loss;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        LossBreakdown terms;
        example_loss_grad(probs.row(i), labels[i], loss_cfg, grad_p, &terms);
        mean_loss += terms;
        const auto p = probs.row(i);
        double dot = 0.0;
        for (std::size_t c = 0; c < num_classes; ++c) dot += grad_p[c] * p[c];
        auto d = delta.row(i);
        for (std::size_t c = 0; c < num_classes; ++c) {
            d[c] = p[c] * (grad_p[c] - dot) * inv_n;
        }
    }
    mean_loss *= inv_n;

    BackwardResult result;
    result.loss = mean_loss;
    result.grads.weight.resize(num_layers);
    result.grads.bias.resize(num_layers);

    Matrix cur = std::move(delta);
    for (std::size_t l = num_layers; l-- > 0;) {
        const Matrix& input = activations[l];
        const std::size_t out_dim = layers[l].weight.rows();
        const std::size_t in_dim = layers[l].weight.cols();

        Matrix grad_w(out_dim, in_dim);
        std::vector<double> grad_b(out_dim, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto d = cur.row(i);
            const auto x = input.row(i);
            for (std::size_t o = 0; o < out_dim; ++o) {
                const double di = d[o];
                if (di == 0.0) continue;
                grad_b[o] += di;
                auto gw = grad_w.row(o);
                for (std::size_t k = 0; k < in_dim; ++k) gw[k] += di * x[k];
            }
        }

        if (l > 0) {
            Matrix prev(n, in_dim);
            for (std::size_t i = 0; i < n; ++i) {
                const auto d = cur.row(i);
                auto pd = prev.row(i);
                for (std::size_t o = 0; o < out_dim; ++o) {
                    const double di = d[o];
                    if (di == 0.0) continue;
                    const auto w = layers[l].weight.row(o);
                    for (std::size_t k = 0; k < in_dim; ++k) pd[k] += di * w[k];
                }
                // ReLU mask of the producing layer (zero at the kink).
                const auto z = pre[l - 1].row(i);
                for (std::size_t k = 0; k < in_dim; ++k) {
                    if (z[k] <= 0.0) pd[k] = 0.0;
                }
            }
            result.grads.weight[l] = std::move(grad_w);
            result.grads.bias[l] = std::move(grad_b);
            cur = std::move(prev);
        } else {
            result.grads.weight[l] = std::move(grad_w);
            result.grads.bias[l] = std::move(grad_b);
        }
    }

    for (std::size_t l = 0; l < num_layers; ++l) {
        if (!all_finite(result.grads.weight[l]) || !all_finite(result.grads.bias[l])) {
            throw std::runtime_error("backward: non-finite gradient");
        }
    }
    return result;
}

void sgd_step(ModelState& model, const Gradients& grads, const OptimizerConfig& cfg, int epoch) {
    cfg.validate();
    if (grads.weight.size() != model.layers().size() || grads.bias.size() != model.layers().size()) {
        throw std::invalid_argument("sgd_step: gradient layer count does not match model");
    }
    const double lr = effective_learning_rate(cfg, epoch);
    for (std::size_t l = 0; l < model.layers().size(); ++l) {
        Layer& layer = model.layers()[l];
        const Matrix& gw = grads.weight[l];
        const std::vector<double>& gb = grads.bias[l];
        if (gw.rows() != layer.weight.rows() || gw.cols() != layer.weight.cols() ||
            gb.size() != layer.bias.size()) {
            throw std::invalid_argument("sgd_step: gradient shape does not match parameters");
        }
        for (std::size_t i = 0; i < layer.weight.size(); ++i) {
            const double g = gw.data()[i] + cfg.weight_decay * layer.weight.data()[i];
            double& v = layer.weight_vel.data()[i];
            v = cfg.momentum * v + g;
            layer.weight.data()[i] -= lr * v;
        }
        for (std::size_t i = 0; i < layer.bias.size(); ++i) {
            const double g = gb[i] + cfg.weight_decay * layer.bias[i];
            double& v = layer.bias_vel[i];
            v = cfg.momentum * v + g;
            layer.bias[i] -= lr * v;
        }
        if (!all_finite(layer.weight) || !all_finite(layer.bias)) {
            throw std::runtime_error("sgd_step: parameters became non-finite");
        }
    }
}

namespace {

constexpr uint32_t kCheckpointMagic = 0x4C4E4C4Du;  // "MLNL" little-endian
constexpr uint32_t kCheckpointVersion = 1;

void write_u32(std::ofstream& out, uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }
void write_i32(std::ofstream& out, int32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }
void write_doubles(std::ofstream& out, const double* p, std::size_t count) {
    out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(count * sizeof(double)));
}

uint32_t read_u32(std::ifstream& in, const std::string& path) {
    uint32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
        throw std::runtime_error("checkpoint truncated: " + path);
    }
    return v;
}

int32_t read_i32(std::ifstream& in, const std::string& path) {
    int32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
        throw std::runtime_error("checkpoint truncated: " + path);
    }
    return v;
}

void read_doubles(std::ifstream& in, double* p, std::size_t count, const std::string& path) {
    if (!in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(count * sizeof(double)))) {
        throw std::runtime_error("checkpoint truncated: " + path);
    }
}

}  // namespace

void save_checkpoint(const ModelState& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    write_u32(out, kCheckpointMagic);
    write_u32(out, kCheckpointVersion);
    write_u32(out, static_cast<uint32_t>(model.widths().size()));
    for (int w : model.widths()) write_i32(out, w);
    for (const Layer& layer : model.layers()) {
        write_doubles(out, layer.weight.data(), layer.weight.size());
        write_doubles(out, layer.bias.data(), layer.bias.size());
        write_doubles(out, layer.weight_vel.data(), layer.weight_vel.size());
        write_doubles(out, layer.bias_vel.data(), layer.bias_vel.size());
    }
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

ModelState load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    if (read_u32(in, path) != kCheckpointMagic) {
        throw std::runtime_error("bad checkpoint magic: " + path);
    }
    if (read_u32(in, path) != kCheckpointVersion) {
        throw std::runtime_error("unsupported checkpoint version: " + path);
    }
    const uint32_t n_widths = read_u32(in, path);
    if (n_widths < 2 || n_widths > 64) {
        throw std::runtime_error("implausible checkpoint shape header: " + path);
    }
    std::vector<int> widths(n_widths);
    for (auto& w : widths) w = read_i32(in, path);

    Rng dummy(0);
    ModelState model(widths, dummy);
    for (Layer& layer : model.layers()) {
        read_doubles(in, layer.weight.data(), layer.weight.size(), path);
        read_doubles(in, layer.bias.data(), layer.bias.size(), path);
        read_doubles(in, layer.weight_vel.data(), layer.weight_vel.size(), path);
        read_doubles(in, layer.bias_vel.data(), layer.bias_vel.size(), path);
    }
    return model;
}

}  // namespace lnl
