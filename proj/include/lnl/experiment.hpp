#pragma once

#include "lnl/config.hpp"
#include "lnl/dataset.hpp"
#include "lnl/trainer.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lnl {

enum class DatasetKind { GaussianMixture, TwoSpirals, IdxFile };

const char* dataset_kind_name(DatasetKind kind);
DatasetKind dataset_kind_from_name(const std::string& name);

struct DatasetSpec {
    DatasetKind kind = DatasetKind::GaussianMixture;
    std::size_t n = 5000;
    std::size_t n_test = 1000;
    int d = 32;
    int k = 10;
    double separation = 5.0;
    uint64_t seed = 1;
    double spiral_jitter = 0.2;
    std::string idx_images, idx_labels, idx_test_images, idx_test_labels;
};

struct NoiseSpec {
    NoiseKind kind = NoiseKind::Symmetric;
    double noise_ratio = 0.4;
    uint64_t seed = 2;
};

struct ExperimentSpec {
    DatasetSpec dataset;
    NoiseSpec noise;
    TrainConfig train;
    std::string out_dir = "out";
    int repeats = 1;

    void validate() const;
};

// Config codec. Unknown keys are rejected so typos fail loudly.
ExperimentSpec spec_from_config(const ConfigMap& cfg);
ConfigMap config_from_spec(const ExperimentSpec& spec);

struct PreparedData {
    NoisyDataset train;
    NoisyDataset test;
};

// Generates (or loads) the clean splits and applies the configured noise to
// the training split only.
PreparedData prepare_data(const DatasetSpec& dataset, const NoiseSpec& noise);

struct RepeatSummary {
    uint64_t train_seed = 0;
    uint64_t noise_seed = 0;
    double final_test_acc = 0.0;
    double final_precision = 0.0;
    double final_recall = 0.0;
    double final_f1 = 0.0;
    int fallback_epochs = 0;
};

struct ExperimentResult {
    std::vector<RepeatSummary> repeats;
    double mean_final_acc = 0.0;
    double std_final_acc = 0.0;
    double mean_final_f1 = 0.0;
    double std_final_f1 = 0.0;
    std::vector<RunResult> runs;  // populated when keep_runs
};

// Runs the experiment `repeats` times; repeat r shifts the noise and train
// seeds by r while the clean dataset stays fixed. With write_outputs the
// per-run metrics (CSV + JSONL), audit CSV, resolved config, checkpoint and
// summary JSON land under spec.out_dir (repeat subdirectories when
// repeats > 1).
ExperimentResult run_experiment(const ExperimentSpec& spec, bool write_outputs,
                                bool keep_runs = false);

// Same loop over datasets that already exist on disk (the output of the
// generate command). The noise is frozen in the files, so repeats shift the
// train seed only.
ExperimentResult run_experiment_on_data(const ExperimentSpec& spec, const NoisyDataset& train,
                                        const NoisyDataset& test, bool write_outputs,
                                        bool keep_runs = false);

// The label columns of an audit CSV (features are skipped).
struct AuditColumns {
    std::vector<int32_t> true_labels;
    std::vector<int32_t> given_labels;
    std::vector<uint8_t> noise_mask;
};

AuditColumns load_audit_csv(const std::string& path);

void write_summary_json(const ExperimentSpec& spec, const ExperimentResult& result,
                        const std::string& path);

// Per-group histogram of fluctuation counts over a full prediction log.
struct FluctuationHistogram {
    std::vector<std::size_t> clean;  // index = fluctuation count
    std::vector<std::size_t> noisy;
    double clean_mean = 0.0;
    double noisy_mean = 0.0;
};

FluctuationHistogram fluctuation_histogram(const PredictionLog& log,
                                           std::span<const int32_t> given_labels,
                                           std::span<const uint8_t> noise_mask);

// CSV schema: fluctuations,clean_count,noisy_count.
void write_histogram_csv(const FluctuationHistogram& hist, const std::string& path);

// Standard output file names inside a run directory.
std::string metrics_csv_path(const std::string& dir);
std::string metrics_jsonl_path(const std::string& dir);
std::string run_dir(const ExperimentSpec& spec, int repeat);

}  // namespace lnl
