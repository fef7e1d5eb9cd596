#pragma once

#include "lnl/dataset.hpp"
#include "lnl/losses.hpp"
#include "lnl/model.hpp"
#include "lnl/selection.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lnl {

enum class Selector { Fluctuation, SmallLoss, Voting, None };

const char* selector_name(Selector s);
Selector selector_from_name(const std::string& name);

struct TrainConfig {
    int warmup_epochs = 5;
    int total_epochs = 60;
    Selector selector = Selector::Fluctuation;
    LossConfig loss;
    OptimizerConfig opt;
    int bank_capacity = 3;
    uint64_t seed = 1;
    int eval_every = 1;
    double assumed_noise_ratio = 0.4;  // small-loss keep fraction is 1 - this
    std::vector<int> hidden = {64, 64};
    bool record_full_log = false;  // keep every epoch's predictions, not just the bank window

    void validate() const;
};

struct EpochMetrics {
    int epoch = 0;
    double loss_ce = 0.0;
    double loss_reg = 0.0;
    double loss_total = 0.0;
    double test_acc = 0.0;
    double sel_precision = 0.0;
    double sel_recall = 0.0;
    double sel_f1 = 0.0;
    std::size_t n_selected = 0;
    std::size_t n_selected_clean = 0;
    double lr = 0.0;
    bool sel_fallback = false;  // empty selection recovered by selecting all
};

// Predictions of the whole training set at every recorded epoch, oldest
// first. Row source for the fluctuation-count histograms.
struct PredictionLog {
    std::size_t n = 0;
    std::vector<std::vector<int32_t>> epochs;
};

struct RunResult {
    std::vector<EpochMetrics> metrics;
    ModelState model;
    MemoryBank bank;
    PredictionLog full_log;  // empty unless record_full_log
    int fallback_epochs = 0;
};

// Fraction of argmax-correct predictions on a disjoint test split.
double evaluate(const ModelState& model, const NoisyDataset& test);

// Orchestrates the two-stage loop: warm-up on the full noisy set under
// CE + runner-up penalty, then per-epoch selection, training on the
// selected set under CE + weighted confidence penalty, and a full-set
// inference pass that refreshes the bank after each parameter update.
class Trainer {
public:
    Trainer(const TrainConfig& cfg, const NoisyDataset& train, const NoisyDataset& test);

    // One warm-up epoch: full-set minibatch SGD, then a bank record.
    EpochMetrics warmup_epoch(int epoch);
    // One main epoch: select, train on the selection, refresh the bank.
    EpochMetrics main_epoch(int epoch);

    RunResult run();

    const ModelState& model() const { return model_; }
    const MemoryBank& bank() const { return bank_; }

private:
    SelectionReport select(int epoch, bool* fallback);
    double train_one_epoch(const std::vector<std::size_t>& pool, const LossConfig& loss_cfg,
                           int epoch, LossBreakdown* mean_loss);
    void record_bank();
    std::vector<double> per_example_ce() const;
    EpochMetrics fill_metrics(int epoch, const SelectionReport& report, const LossBreakdown& loss,
                              bool fallback);

    TrainConfig cfg_;
    const NoisyDataset& train_;
    const NoisyDataset& test_;
    Rng rng_;
    ModelState model_;
    MemoryBank bank_;
    PredictionLog full_log_;
    int fallback_epochs_ = 0;
    double last_test_acc_ = 0.0;
};

RunResult run(const TrainConfig& cfg, const NoisyDataset& train, const NoisyDataset& test);

// Metrics CSV schema (one row per epoch):
// epoch,loss_ce,loss_reg,loss_total,test_acc,sel_precision,sel_recall,sel_f1,
// n_selected,n_selected_clean,lr
void write_metrics_csv(const std::vector<EpochMetrics>& metrics, const std::string& path);
// Same rows mirrored as JSON objects, one per line.
void write_metrics_jsonl(const std::vector<EpochMetrics>& metrics, const std::string& path);

void write_prediction_log_csv(const PredictionLog& log, const std::string& path);
PredictionLog load_prediction_log_csv(const std::string& path);

}  // namespace lnl
