#pragma once

#include "lnl/losses.hpp"
#include "lnl/matrix.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace lnl {

using Rng = std::mt19937_64;

struct OptimizerConfig {
    double learning_rate = 0.02;
    double momentum = 0.9;
    double weight_decay = 5e-4;
    int lr_decay_epoch = 45;       // single decay milestone
    double lr_decay_factor = 10.0;
    int batch_size = 32;

    void validate() const;
};

// lr / factor once the decay milestone has passed (epoch >= lr_decay_epoch).
double effective_learning_rate(const OptimizerConfig& cfg, int epoch);

// One dense layer, weights stored out x in, plus matching momentum buffers.
struct Layer {
    Matrix weight;
    std::vector<double> bias;
    Matrix weight_vel;
    std::vector<double> bias_vel;

    bool operator==(const Layer&) const = default;
};

// Feed-forward ReLU classifier with a softmax head. All arithmetic is double
// precision. Hidden activations are rectified-linear; the output layer is
// linear and forward() applies a max-subtracted softmax.
class ModelState {
public:
    ModelState() = default;

    // widths: input dim, hidden widths..., num_classes. Weights drawn from
    // Uniform(-sqrt(6/fan_in), +sqrt(6/fan_in)), biases zero.
    ModelState(const std::vector<int>& widths, Rng& rng);

    int input_dim() const { return widths_.empty() ? 0 : widths_.front(); }
    int num_classes() const { return widths_.empty() ? 0 : widths_.back(); }
    const std::vector<int>& widths() const { return widths_; }

    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }

    bool operator==(const ModelState&) const = default;

private:
    std::vector<int> widths_;
    std::vector<Layer> layers_;
};

// Row-stochastic class probabilities for a batch (rows = examples).
Matrix forward(const ModelState& model, const Matrix& batch);

// Per-row argmax labels; ties broken toward the lowest class index.
std::vector<int32_t> predict(const ModelState& model, const Matrix& batch);

struct Gradients {
    std::vector<Matrix> weight;
    std::vector<std::vector<double>> bias;
};

struct BackwardResult {
    Gradients grads;
    LossBreakdown loss;  // mean over the batch
};

// Mean loss over the batch and its exact gradient w.r.t. every parameter.
BackwardResult backward(const ModelState& model, const Matrix& batch,
                        std::span<const int32_t> labels, const LossConfig& loss_cfg);

// Heavy-ball SGD with weight decay folded into the gradient before the
// momentum buffer: g' = g + wd*w; v = m*v + g'; w -= lr_eff * v.
void sgd_step(ModelState& model, const Gradients& grads, const OptimizerConfig& cfg, int epoch);

// Flat little-endian binary checkpoint: shape header then all parameters and
// momentum buffers as 64-bit floats.
void save_checkpoint(const ModelState& model, const std::string& path);
ModelState load_checkpoint(const std::string& path);

}  // namespace lnl
