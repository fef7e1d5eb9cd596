#include "lnl/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lnl {

namespace {

double clamped(double p) { return p < kProbFloor ? kProbFloor : p; }

double safe_log(double p) { return std::log(clamped(p)); }

void check_label(std::span<const double> p, int32_t y) {
    if (y < 0 || static_cast<std::size_t>(y) >= p.size()) {
        throw std::invalid_argument("label out of range for probability vector");
    }
}

}  // namespace

void LossConfig::validate() const {
    if (!(confidence_threshold > 0.0) || confidence_threshold > 1.0) {
        throw std::invalid_argument("LossConfig.confidence_threshold must be in (0, 1]");
    }
    if (cr_weight < 0.0) {
        throw std::invalid_argument("LossConfig.cr_weight must be >= 0");
    }
    if (smoothing < 0.0 || smoothing >= 1.0) {
        throw std::invalid_argument("LossConfig.smoothing must be in [0, 1)");
    }
}

LossBreakdown& LossBreakdown::operator+=(const LossBreakdown& o) {
    ce += o.ce;
    warmup_r += o.warmup_r;
    cr += o.cr;
    ls += o.ls;
    total += o.total;
    return *this;
}

LossBreakdown& LossBreakdown::operator*=(double s) {
    ce *= s;
    warmup_r *= s;
    cr *= s;
    ls *= s;
    total *= s;
    return *this;
}

double confidence_weight(double p_k, double p_y, double threshold) {
    return std::max(0.0, threshold - clamped(p_k) / clamped(p_y));
}

std::size_t second_largest_index(std::span<const double> p) {
    if (p.size() < 2) {
        throw std::invalid_argument("second_largest_index needs at least two classes");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (p[i] > p[best]) best = i;
    }
    std::size_t second = (best == 0) ? 1 : 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i == best || i == second) continue;
        if (p[i] > p[second]) second = i;
    }
    return second;
}

double cross_entropy(std::span<const double> p, int32_t y) {
    check_label(p, y);
    return -safe_log(p[static_cast<std::size_t>(y)]);
}

double warmup_penalty(std::span<const double> p, int32_t y, double threshold) {
    check_label(p, y);
    const std::size_t j = second_largest_index(p);
    const double a = confidence_weight(p[j], p[static_cast<std::size_t>(y)], threshold);
    return -a * safe_log(p[j]);
}

double confidence_penalty(std::span<const double> p, int32_t y, double threshold) {
    check_label(p, y);
    const double p_y = p[static_cast<std::size_t>(y)];
    double sum = 0.0;
    for (double p_k : p) {
        sum += confidence_weight(p_k, p_y, threshold) * -safe_log(p_k);
    }
    return sum / static_cast<double>(p.size());
}

double confidence_penalty_constant_weight(std::span<const double> p, double weight) {
    double sum = 0.0;
    for (double p_k : p) {
        sum += weight * -safe_log(p_k);
    }
    return sum / static_cast<double>(p.size());
}

double label_smoothing_loss(std::span<const double> p, int32_t y, double smoothing) {
    check_label(p, y);
    double penalty = 0.0;
    for (double p_k : p) {
        penalty += -safe_log(p_k);
    }
    return cross_entropy(p, y) + smoothing * penalty;
}

LossBreakdown example_loss(std::span<const double> p, int32_t y, const LossConfig& cfg) {
    LossBreakdown out;
    out.ce = cross_entropy(p, y);
    switch (cfg.stage) {
        case Stage::Warmup:
            if (cfg.warmup_penalty_enabled) {
                out.warmup_r = warmup_penalty(p, y, cfg.confidence_threshold);
            }
            out.total = out.ce + out.warmup_r;
            break;
        case Stage::Main:
            out.cr = confidence_penalty(p, y, cfg.confidence_threshold);
            out.total = out.ce + cfg.cr_weight * out.cr;
            break;
        case Stage::LabelSmoothing:
            out.ls = label_smoothing_loss(p, y, cfg.smoothing) - out.ce;
            out.total = out.ce + out.ls;
            break;
    }
    return out;
}

namespace {

// d/dp of -confidence_weight(p_j, p_y) * log(p_j), accumulated into grad.
// Both factors carry gradient unless the weight is detached; the clip region
// contributes zero. Indices j and y may coincide (then the weight is zero
// for thresholds <= 1 and nothing accumulates).
void accumulate_weighted_log_grad(std::span<const double> p, std::size_t j, std::size_t y,
                                  double threshold, double scale, bool detached,
                                  std::span<double> grad) {
    const double pj = clamped(p[j]);
    const double py = clamped(p[y]);
    const double a = std::max(0.0, threshold - pj / py);
    if (a <= 0.0) return;
    const double log_pj = std::log(pj);
    if (p[j] > kProbFloor) {
        grad[j] += scale * (-a / pj);
        if (!detached) grad[j] += scale * (log_pj / py);
    }
    if (!detached && p[y] > kProbFloor) {
        grad[y] += scale * (-(pj / (py * py)) * log_pj);
    }
}

}  // namespace

void example_loss_grad(std::span<const double> p, int32_t y, const LossConfig& cfg,
                       std::span<double> grad_p, LossBreakdown* terms) {
    check_label(p, y);
    if (grad_p.size() != p.size()) {
        throw std::invalid_argument("example_loss_grad: gradient buffer size mismatch");
    }
    std::fill(grad_p.begin(), grad_p.end(), 0.0);
    const std::size_t yu = static_cast<std::size_t>(y);

    // CE term, shared by every stage.
    if (p[yu] > kProbFloor) grad_p[yu] += -1.0 / p[yu];

    switch (cfg.stage) {
        case Stage::Warmup:
            if (cfg.warmup_penalty_enabled) {
                const std::size_t j = second_largest_index(p);
                accumulate_weighted_log_grad(p, j, yu, cfg.confidence_threshold, 1.0,
                                             cfg.adaptive_weight_detached, grad_p);
            }
            break;
        case Stage::Main: {
            const double scale = cfg.cr_weight / static_cast<double>(p.size());
            for (std::size_t k = 0; k < p.size(); ++k) {
                accumulate_weighted_log_grad(p, k, yu, cfg.confidence_threshold, scale,
                                             cfg.adaptive_weight_detached, grad_p);
            }
            break;
        }
        case Stage::LabelSmoothing:
            for (std::size_t k = 0; k < p.size(); ++k) {
                if (p[k] > kProbFloor) grad_p[k] += -cfg.smoothing / p[k];
            }
            break;
    }

    if (terms != nullptr) {
        *terms = example_loss(p, y, cfg);
    }
}

BatchLoss objective(const Matrix& probs, std::span<const int32_t> labels, const LossConfig& cfg) {
    if (probs.rows() != labels.size()) {
        throw std::invalid_argument("objective: labels do not align with probability rows");
    }
    if (probs.rows() == 0) {
        throw std::invalid_argument("objective: empty batch");
    }
    cfg.validate();
    BatchLoss out;
    out.per_example.reserve(probs.rows());
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        out.per_example.push_back(example_loss(probs.row(i), labels[i], cfg));
        out.mean += out.per_example.back();
    }
    out.mean *= 1.0 / static_cast<double>(probs.rows());
    return out;
}

}  // namespace lnl
