#pragma once

#include "lnl/matrix.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace lnl {

// Floor applied to any probability before it enters a log or a ratio.
inline constexpr double kProbFloor = 1e-12;

enum class Stage { Warmup, Main, LabelSmoothing };

// Knobs of the training objective. The warm-up stage trains on the full set
// with CE plus a penalty on the runner-up class; the main stage trains on the
// selected set with CE plus a weighted all-class confidence penalty. The
// label-smoothing stage is a fixed-coefficient baseline kept for comparison
// runs.
struct LossConfig {
    Stage stage = Stage::Main;
    double confidence_threshold = 0.2;  // ratio gate for the adaptive weight
    double cr_weight = 1.0;             // trade-off on the confidence penalty
    double smoothing = 0.0;             // label-smoothing coefficient, in [0,1)
    bool warmup_penalty_enabled = true; // disable for ablation runs
    bool adaptive_weight_detached = false;  // treat the weight as a constant in gradients

    void validate() const;  // throws std::invalid_argument naming the bad field
};

// Per-example loss components. "warmup_r" and "cr" are the raw penalty
// values; "total" already includes cr_weight where it applies.
struct LossBreakdown {
    double ce = 0.0;
    double warmup_r = 0.0;
    double cr = 0.0;
    double ls = 0.0;
    double total = 0.0;

    LossBreakdown& operator+=(const LossBreakdown& o);
    LossBreakdown& operator*=(double s);
};

// max(0, threshold - p_k/p_y): grows as the model gets overconfident in the
// labeled class relative to class k, clips to zero once the ratio clears the
// threshold.
double confidence_weight(double p_k, double p_y, double threshold);

// Index of the second-largest entry; ties broken toward the lowest index.
std::size_t second_largest_index(std::span<const double> p);

double cross_entropy(std::span<const double> p, int32_t y);

// Penalty on the runner-up class, weighted by confidence_weight.
double warmup_penalty(std::span<const double> p, int32_t y, double threshold);

// Mean over all classes of the weighted negative log-probabilities.
double confidence_penalty(std::span<const double> p, int32_t y, double threshold);

// Same sum but with a caller-supplied constant weight for every class; the
// label-smoothing reduction checks lean on this.
double confidence_penalty_constant_weight(std::span<const double> p, double weight);

// CE plus a fixed smoothing term over all classes; smoothing = 0 is plain CE.
double label_smoothing_loss(std::span<const double> p, int32_t y, double smoothing);

// Loss components of one example under the configured objective.
LossBreakdown example_loss(std::span<const double> p, int32_t y, const LossConfig& cfg);

// d(total)/d(p) of the configured objective for one example. grad_p must have
// the same length as p and is overwritten. When terms is non-null the loss
// components are stored there as well.
void example_loss_grad(std::span<const double> p, int32_t y, const LossConfig& cfg,
                       std::span<double> grad_p, LossBreakdown* terms = nullptr);

struct BatchLoss {
    LossBreakdown mean;
    std::vector<LossBreakdown> per_example;
};

// Mean loss over a batch of row-stochastic probabilities.
BatchLoss objective(const Matrix& probs, std::span<const int32_t> labels, const LossConfig& cfg);

}  // namespace lnl
