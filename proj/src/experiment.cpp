#include "lnl/experiment.hpp"

#include "lnl/generators.hpp"
#include "lnl/idx.hpp"
#include "lnl/noise.hpp"

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace lnl {

const char* dataset_kind_name(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::GaussianMixture: return "gaussian-mixture";
        case DatasetKind::TwoSpirals: return "two-spirals";
        case DatasetKind::IdxFile: return "idx-file";
    }
    return "unknown";
}

DatasetKind dataset_kind_from_name(const std::string& name) {
    if (name == "gaussian-mixture") return DatasetKind::GaussianMixture;
    if (name == "two-spirals") return DatasetKind::TwoSpirals;
    if (name == "idx-file") return DatasetKind::IdxFile;
    throw std::invalid_argument("unknown dataset kind: " + name);
}

void ExperimentSpec::validate() const {
    if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    if (out_dir.empty()) throw std::invalid_argument("out_dir must not be empty");
    if (dataset.n == 0) throw std::invalid_argument("dataset.n must be positive");
    if (dataset.n_test == 0) throw std::invalid_argument("dataset.n_test must be positive");
    if (dataset.kind != DatasetKind::IdxFile) {
        if (dataset.d <= 0) throw std::invalid_argument("dataset.d must be positive");
        if (dataset.k < 2) throw std::invalid_argument("dataset.k must be >= 2");
    }
    if (dataset.kind == DatasetKind::TwoSpirals && dataset.k != 2) {
        throw std::invalid_argument("dataset.k must be 2 for two-spirals");
    }
    if (dataset.kind == DatasetKind::IdxFile &&
        (dataset.idx_images.empty() || dataset.idx_labels.empty() ||
         dataset.idx_test_images.empty() || dataset.idx_test_labels.empty())) {
        throw std::invalid_argument("dataset.idx_* paths are required for idx-file datasets");
    }
    if (noise.noise_ratio < 0.0 || noise.noise_ratio >= 1.0) {
        throw std::invalid_argument("noise.noise_ratio must be in [0, 1)");
    }
    train.validate();
}

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "seed",
        "out_dir",
        "repeats",
        "dataset.kind",
        "dataset.n",
        "dataset.n_test",
        "dataset.d",
        "dataset.k",
        "dataset.separation",
        "dataset.seed",
        "dataset.spiral_jitter",
        "dataset.idx_images",
        "dataset.idx_labels",
        "dataset.idx_test_images",
        "dataset.idx_test_labels",
        "noise.kind",
        "noise.noise_ratio",
        "noise.seed",
        "train.warmup_epochs",
        "train.total_epochs",
        "train.selector",
        "train.bank_capacity",
        "train.seed",
        "train.eval_every",
        "train.assumed_noise_ratio",
        "train.hidden",
        "train.record_full_log",
        "loss.stage",
        "loss.confidence_threshold",
        "loss.cr_weight",
        "loss.smoothing",
        "loss.warmup_penalty",
        "loss.detach_weight",
        "opt.learning_rate",
        "opt.momentum",
        "opt.weight_decay",
        "opt.lr_decay_epoch",
        "opt.lr_decay_factor",
        "opt.batch_size",
    };
    return keys;
}

std::vector<int> parse_hidden(const std::string& text) {
    std::vector<int> widths;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            widths.push_back(std::stoi(cell));
        } catch (const std::exception&) {
            throw std::invalid_argument("config key 'train.hidden' has a bad width: " + cell);
        }
    }
    if (widths.empty()) throw std::invalid_argument("config key 'train.hidden' is empty");
    return widths;
}

std::string hidden_to_string(const std::vector<int>& widths) {
    std::string out;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(widths[i]);
    }
    return out;
}

std::string fmt_double_cfg(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Stage stage_from_name(const std::string& name) {
    if (name == "main") return Stage::Main;
    if (name == "label_smoothing") return Stage::LabelSmoothing;
    throw std::invalid_argument("unknown loss stage: " + name);
}

const char* stage_name(Stage stage) {
    switch (stage) {
        case Stage::Warmup: return "warmup";
        case Stage::Main: return "main";
        case Stage::LabelSmoothing: return "label_smoothing";
    }
    return "unknown";
}

}  // namespace

ExperimentSpec spec_from_config(const ConfigMap& cfg) {
    for (const auto& [key, value] : cfg) {
        (void)value;
        if (known_keys().find(key) == known_keys().end()) {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }

    ExperimentSpec spec;
    const long base_seed = get_int(cfg, "seed", 1);

    spec.dataset.kind = dataset_kind_from_name(get_string(cfg, "dataset.kind", "gaussian-mixture"));
    spec.dataset.n = static_cast<std::size_t>(get_int(cfg, "dataset.n", 5000));
    spec.dataset.n_test = static_cast<std::size_t>(get_int(cfg, "dataset.n_test", 1000));
    spec.dataset.d = static_cast<int>(get_int(cfg, "dataset.d", 32));
    spec.dataset.k = static_cast<int>(get_int(cfg, "dataset.k", 10));
    spec.dataset.separation = get_double(cfg, "dataset.separation", 5.0);
    spec.dataset.seed = static_cast<uint64_t>(get_int(cfg, "dataset.seed", base_seed));
    spec.dataset.spiral_jitter = get_double(cfg, "dataset.spiral_jitter", 0.2);
    spec.dataset.idx_images = get_string(cfg, "dataset.idx_images", "");
    spec.dataset.idx_labels = get_string(cfg, "dataset.idx_labels", "");
    spec.dataset.idx_test_images = get_string(cfg, "dataset.idx_test_images", "");
    spec.dataset.idx_test_labels = get_string(cfg, "dataset.idx_test_labels", "");

    spec.noise.kind = noise_kind_from_name(get_string(cfg, "noise.kind", "symmetric"));
    spec.noise.noise_ratio = get_double(cfg, "noise.noise_ratio", 0.4);
    spec.noise.seed = static_cast<uint64_t>(get_int(cfg, "noise.seed", base_seed + 1));

    spec.train.warmup_epochs = static_cast<int>(get_int(cfg, "train.warmup_epochs", 5));
    spec.train.total_epochs = static_cast<int>(get_int(cfg, "train.total_epochs", 60));
    spec.train.selector = selector_from_name(get_string(cfg, "train.selector", "fluctuation"));
    spec.train.bank_capacity = static_cast<int>(get_int(cfg, "train.bank_capacity", 3));
    spec.train.seed = static_cast<uint64_t>(get_int(cfg, "train.seed", base_seed + 2));
    spec.train.eval_every = static_cast<int>(get_int(cfg, "train.eval_every", 1));
    spec.train.assumed_noise_ratio = get_double(cfg, "train.assumed_noise_ratio", 0.4);
    spec.train.hidden = parse_hidden(get_string(cfg, "train.hidden", "64,64"));
    spec.train.record_full_log = get_bool(cfg, "train.record_full_log", false);

    spec.train.loss.stage = stage_from_name(get_string(cfg, "loss.stage", "main"));
    spec.train.loss.confidence_threshold = get_double(cfg, "loss.confidence_threshold", 0.2);
    spec.train.loss.cr_weight = get_double(cfg, "loss.cr_weight", 1.0);
    spec.train.loss.smoothing = get_double(cfg, "loss.smoothing", 0.0);
    spec.train.loss.warmup_penalty_enabled = get_bool(cfg, "loss.warmup_penalty", true);
    spec.train.loss.adaptive_weight_detached = get_bool(cfg, "loss.detach_weight", false);

    spec.train.opt.learning_rate = get_double(cfg, "opt.learning_rate", 0.02);
    spec.train.opt.momentum = get_double(cfg, "opt.momentum", 0.9);
    spec.train.opt.weight_decay = get_double(cfg, "opt.weight_decay", 5e-4);
    spec.train.opt.lr_decay_epoch = static_cast<int>(get_int(cfg, "opt.lr_decay_epoch", 45));
    spec.train.opt.lr_decay_factor = get_double(cfg, "opt.lr_decay_factor", 10.0);
    spec.train.opt.batch_size = static_cast<int>(get_int(cfg, "opt.batch_size", 32));

    spec.out_dir = get_string(cfg, "out_dir", "out");
    spec.repeats = static_cast<int>(get_int(cfg, "repeats", 1));

    spec.validate();
    return spec;
}

ConfigMap config_from_spec(const ExperimentSpec& spec) {
    ConfigMap cfg;
    cfg["dataset.kind"] = dataset_kind_name(spec.dataset.kind);
    cfg["dataset.n"] = std::to_string(spec.dataset.n);
    cfg["dataset.n_test"] = std::to_string(spec.dataset.n_test);
    cfg["dataset.d"] = std::to_string(spec.dataset.d);
    cfg["dataset.k"] = std::to_string(spec.dataset.k);
    cfg["dataset.separation"] = fmt_double_cfg(spec.dataset.separation);
    cfg["dataset.seed"] = std::to_string(spec.dataset.seed);
    cfg["dataset.spiral_jitter"] = fmt_double_cfg(spec.dataset.spiral_jitter);
    if (!spec.dataset.idx_images.empty()) cfg["dataset.idx_images"] = spec.dataset.idx_images;
    if (!spec.dataset.idx_labels.empty()) cfg["dataset.idx_labels"] = spec.dataset.idx_labels;
    if (!spec.dataset.idx_test_images.empty()) cfg["dataset.idx_test_images"] = spec.dataset.idx_test_images;
    if (!spec.dataset.idx_test_labels.empty()) cfg["dataset.idx_test_labels"] = spec.dataset.idx_test_labels;
    cfg["noise.kind"] = noise_kind_name(spec.noise.kind);
    cfg["noise.noise_ratio"] = fmt_double_cfg(spec.noise.noise_ratio);
    cfg["noise.seed"] = std::to_string(spec.noise.seed);
    cfg["train.warmup_epochs"] = std::to_string(spec.train.warmup_epochs);
    cfg["train.total_epochs"] = std::to_string(spec.train.total_epochs);
    cfg["train.selector"] = selector_name(spec.train.selector);
    cfg["train.bank_capacity"] = std::to_string(spec.train.bank_capacity);
    cfg["train.seed"] = std::to_string(spec.train.seed);
    cfg["train.eval_every"] = std::to_string(spec.train.eval_every);
    cfg["train.assumed_noise_ratio"] = fmt_double_cfg(spec.train.assumed_noise_ratio);
    cfg["train.hidden"] = hidden_to_string(spec.train.hidden);
    cfg["train.record_full_log"] = spec.train.record_full_log ? "true" : "false";
    cfg["loss.stage"] = stage_name(spec.train.loss.stage == Stage::Warmup ? Stage::Main : spec.train.loss.stage);
    cfg["loss.confidence_threshold"] = fmt_double_cfg(spec.train.loss.confidence_threshold);
    cfg["loss.cr_weight"] = fmt_double_cfg(spec.train.loss.cr_weight);
    cfg["loss.smoothing"] = fmt_double_cfg(spec.train.loss.smoothing);
    cfg["loss.warmup_penalty"] = spec.train.loss.warmup_penalty_enabled ? "true" : "false";
    cfg["loss.detach_weight"] = spec.train.loss.adaptive_weight_detached ? "true" : "false";
    cfg["opt.learning_rate"] = fmt_double_cfg(spec.train.opt.learning_rate);
    cfg["opt.momentum"] = fmt_double_cfg(spec.train.opt.momentum);
    cfg["opt.weight_decay"] = fmt_double_cfg(spec.train.opt.weight_decay);
    cfg["opt.lr_decay_epoch"] = std::to_string(spec.train.opt.lr_decay_epoch);
    cfg["opt.lr_decay_factor"] = fmt_double_cfg(spec.train.opt.lr_decay_factor);
    cfg["opt.batch_size"] = std::to_string(spec.train.opt.batch_size);
    cfg["out_dir"] = spec.out_dir;
    cfg["repeats"] = std::to_string(spec.repeats);
    return cfg;
}

namespace {

struct CleanSplits {
    Dataset train;
    Dataset test;
};

Dataset slice(const Dataset& ds, std::size_t begin, std::size_t count) {
    Dataset out;
    out.num_classes = ds.num_classes;
    out.features = Matrix(count, ds.features.cols());
    out.labels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto src = ds.features.row(begin + i);
        std::copy(src.begin(), src.end(), out.features.row(i).begin());
        out.labels[i] = ds.labels[begin + i];
    }
    return out;
}

CleanSplits make_clean_splits(const DatasetSpec& spec) {
    CleanSplits out;
    switch (spec.kind) {
        case DatasetKind::GaussianMixture: {
            const Dataset all = make_gaussian_mixture(spec.n + spec.n_test, spec.d,
                                                      static_cast<int32_t>(spec.k), spec.separation,
                                                      spec.seed);
            out.train = slice(all, 0, spec.n);
            out.test = slice(all, spec.n, spec.n_test);
            break;
        }
        case DatasetKind::TwoSpirals: {
            const Dataset all = make_two_spirals(spec.n + spec.n_test, spec.spiral_jitter, spec.seed);
            out.train = slice(all, 0, spec.n);
            out.test = slice(all, spec.n, spec.n_test);
            break;
        }
        case DatasetKind::IdxFile: {
            out.train.features = load_idx_images(spec.idx_images);
            out.train.labels = load_idx_labels(spec.idx_labels);
            out.train.num_classes = static_cast<int32_t>(spec.k);
            out.test.features = load_idx_images(spec.idx_test_images);
            out.test.labels = load_idx_labels(spec.idx_test_labels);
            out.test.num_classes = static_cast<int32_t>(spec.k);
            if (out.train.features.rows() != out.train.labels.size() ||
                out.test.features.rows() != out.test.labels.size()) {
                throw std::runtime_error("idx dataset: image and label counts differ");
            }
            for (int32_t label : out.train.labels) {
                if (label < 0 || label >= out.train.num_classes) {
                    throw std::runtime_error("idx dataset: label out of range for dataset.k");
                }
            }
            for (int32_t label : out.test.labels) {
                if (label < 0 || label >= out.test.num_classes) {
                    throw std::runtime_error("idx dataset: label out of range for dataset.k");
                }
            }
            break;
        }
    }
    return out;
}

NoisyDataset corrupt(const Dataset& clean, const NoiseSpec& noise) {
    switch (noise.kind) {
        case NoiseKind::None:
            return as_noisy(clean);
        case NoiseKind::Symmetric:
            return apply_matrix_noise(clean, build_symmetric(clean.num_classes, noise.noise_ratio),
                                      noise.seed);
        case NoiseKind::Pair:
            return apply_matrix_noise(clean, build_pair(clean.num_classes, noise.noise_ratio),
                                      noise.seed);
        case NoiseKind::Instance:
            return apply_instance_noise(clean, noise.noise_ratio, noise.seed);
    }
    throw std::invalid_argument("corrupt: unknown noise kind");
}

double sample_std(const std::vector<double>& values, double mean) {
    if (values.size() < 2) return 0.0;
    double acc = 0.0;
    for (double v : values) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

}  // namespace

PreparedData prepare_data(const DatasetSpec& dataset, const NoiseSpec& noise) {
    const CleanSplits splits = make_clean_splits(dataset);
    PreparedData out;
    out.train = corrupt(splits.train, noise);
    out.test = as_noisy(splits.test);
    return out;
}

std::string run_dir(const ExperimentSpec& spec, int repeat) {
    if (spec.repeats == 1) return spec.out_dir;
    return (fs::path(spec.out_dir) / ("rep" + std::to_string(repeat))).string();
}

std::string metrics_csv_path(const std::string& dir) {
    return (fs::path(dir) / "metrics.csv").string();
}

std::string metrics_jsonl_path(const std::string& dir) {
    return (fs::path(dir) / "metrics.jsonl").string();
}

namespace {

// Shared repeat loop: provide_train(r) yields the (possibly re-corrupted)
// training split of repeat r.
template <typename TrainProvider>
ExperimentResult run_repeats(const ExperimentSpec& spec, const NoisyDataset& test,
                             TrainProvider&& provide_train, bool write_outputs, bool keep_runs) {
    if (write_outputs) {
        fs::create_directories(spec.out_dir);
        write_config_file(config_from_spec(spec), (fs::path(spec.out_dir) / "config.txt").string());
    }

    ExperimentResult result;
    std::vector<double> accs;
    std::vector<double> f1s;
    for (int r = 0; r < spec.repeats; ++r) {
        TrainConfig train_cfg = spec.train;
        train_cfg.seed += static_cast<uint64_t>(r);

        const NoisyDataset noisy_train = provide_train(r);
        RunResult run_result = run(train_cfg, noisy_train, test);

        RepeatSummary summary;
        summary.train_seed = train_cfg.seed;
        summary.noise_seed = spec.noise.seed + static_cast<uint64_t>(r);
        const EpochMetrics& last = run_result.metrics.back();
        summary.final_test_acc = last.test_acc;
        summary.final_precision = last.sel_precision;
        summary.final_recall = last.sel_recall;
        summary.final_f1 = last.sel_f1;
        summary.fallback_epochs = run_result.fallback_epochs;
        result.repeats.push_back(summary);
        accs.push_back(summary.final_test_acc);
        f1s.push_back(summary.final_f1);

        if (write_outputs) {
            const std::string dir = run_dir(spec, r);
            fs::create_directories(dir);
            write_metrics_csv(run_result.metrics, metrics_csv_path(dir));
            write_metrics_jsonl(run_result.metrics, metrics_jsonl_path(dir));
            write_audit_csv(noisy_train, (fs::path(dir) / "audit.csv").string());
            save_checkpoint(run_result.model, (fs::path(dir) / "checkpoint.bin").string());
            run_result.bank.dump_csv((fs::path(dir) / "bank.csv").string());
            if (train_cfg.record_full_log) {
                write_prediction_log_csv(run_result.full_log,
                                         (fs::path(dir) / "predictions.csv").string());
            }
            if ((spec.train.selector == Selector::Fluctuation && run_result.bank.fill() >= 2) ||
                (spec.train.selector == Selector::Voting && run_result.bank.fill() >= 1)) {
                SelectionReport report =
                    spec.train.selector == Selector::Fluctuation
                        ? select_fluctuation(run_result.bank, noisy_train.given_labels,
                                             noisy_train.noise_mask)
                        : select_voting(run_result.bank, noisy_train.given_labels,
                                        noisy_train.noise_mask);
                write_report_json(report, (fs::path(dir) / "final_selection.json").string());
            }
        }
        if (keep_runs) result.runs.push_back(std::move(run_result));
    }

    result.mean_final_acc = 0.0;
    result.mean_final_f1 = 0.0;
    for (double a : accs) result.mean_final_acc += a;
    for (double f : f1s) result.mean_final_f1 += f;
    result.mean_final_acc /= static_cast<double>(accs.size());
    result.mean_final_f1 /= static_cast<double>(f1s.size());
    result.std_final_acc = sample_std(accs, result.mean_final_acc);
    result.std_final_f1 = sample_std(f1s, result.mean_final_f1);

    if (write_outputs) {
        write_summary_json(spec, result, (fs::path(spec.out_dir) / "summary.json").string());
    }
    return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, bool write_outputs, bool keep_runs) {
    spec.validate();
    const CleanSplits splits = make_clean_splits(spec.dataset);
    const NoisyDataset test = as_noisy(splits.test);
    return run_repeats(
        spec, test,
        [&](int r) {
            NoiseSpec noise = spec.noise;
            noise.seed += static_cast<uint64_t>(r);
            return corrupt(splits.train, noise);
        },
        write_outputs, keep_runs);
}

ExperimentResult run_experiment_on_data(const ExperimentSpec& spec, const NoisyDataset& train,
                                        const NoisyDataset& test, bool write_outputs,
                                        bool keep_runs) {
    spec.validate();
    return run_repeats(
        spec, test, [&](int) { return train; }, write_outputs, keep_runs);
}

AuditColumns load_audit_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open audit csv: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("index,true_label,given_label,noisy", 0) != 0) {
        throw std::runtime_error("audit csv missing expected header: " + path);
    }
    AuditColumns out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');  // index
        if (!std::getline(ss, cell, ',')) throw std::runtime_error("audit csv row too short: " + path);
        out.true_labels.push_back(static_cast<int32_t>(std::stol(cell)));
        if (!std::getline(ss, cell, ',')) throw std::runtime_error("audit csv row too short: " + path);
        out.given_labels.push_back(static_cast<int32_t>(std::stol(cell)));
        if (!std::getline(ss, cell, ',')) throw std::runtime_error("audit csv row too short: " + path);
        out.noise_mask.push_back(cell == "1" ? 1 : 0);
    }
    if (out.given_labels.empty()) throw std::runtime_error("audit csv has no rows: " + path);
    return out;
}

void write_summary_json(const ExperimentSpec& spec, const ExperimentResult& result,
                        const std::string& path) {
    nlohmann::json j;
    j["config"] = nlohmann::json::object();
    for (const auto& [key, value] : config_from_spec(spec)) j["config"][key] = value;
    j["repeats"] = nlohmann::json::array();
    for (const RepeatSummary& r : result.repeats) {
        nlohmann::json jr;
        jr["train_seed"] = r.train_seed;
        jr["noise_seed"] = r.noise_seed;
        jr["final_test_acc"] = r.final_test_acc;
        jr["final_precision"] = r.final_precision;
        jr["final_recall"] = r.final_recall;
        jr["final_f1"] = r.final_f1;
        jr["fallback_epochs"] = r.fallback_epochs;
        j["repeats"].push_back(jr);
    }
    j["aggregate"]["repeat_count"] = result.repeats.size();
    j["aggregate"]["mean_final_acc"] = result.mean_final_acc;
    j["aggregate"]["std_final_acc"] = result.std_final_acc;
    j["aggregate"]["mean_final_f1"] = result.mean_final_f1;
    j["aggregate"]["std_final_f1"] = result.std_final_f1;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open summary for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("summary write failed: " + path);
}

FluctuationHistogram fluctuation_histogram(const PredictionLog& log,
                                           std::span<const int32_t> given_labels,
                                           std::span<const uint8_t> noise_mask) {
    if (log.epochs.empty()) throw std::invalid_argument("fluctuation_histogram: empty prediction log");
    if (given_labels.size() != log.n || noise_mask.size() != log.n) {
        throw std::invalid_argument("fluctuation_histogram: label or mask length does not match log");
    }
    FluctuationHistogram hist;
    double clean_sum = 0.0, noisy_sum = 0.0;
    std::size_t clean_n = 0, noisy_n = 0;
    std::vector<int32_t> sequence(log.epochs.size());
    for (std::size_t i = 0; i < log.n; ++i) {
        for (std::size_t e = 0; e < log.epochs.size(); ++e) sequence[e] = log.epochs[e][i];
        const int count = count_fluctuations(sequence, given_labels[i]);
        auto& bins = noise_mask[i] ? hist.noisy : hist.clean;
        if (bins.size() <= static_cast<std::size_t>(count)) bins.resize(count + 1, 0);
        ++bins[static_cast<std::size_t>(count)];
        if (noise_mask[i]) {
            noisy_sum += count;
            ++noisy_n;
        } else {
            clean_sum += count;
            ++clean_n;
        }
    }
    hist.clean_mean = clean_n == 0 ? 0.0 : clean_sum / static_cast<double>(clean_n);
    hist.noisy_mean = noisy_n == 0 ? 0.0 : noisy_sum / static_cast<double>(noisy_n);
    return hist;
}

void write_histogram_csv(const FluctuationHistogram& hist, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open histogram for writing: " + path);
    out << "fluctuations,clean_count,noisy_count\n";
    const std::size_t bins = std::max(hist.clean.size(), hist.noisy.size());
    for (std::size_t b = 0; b < bins; ++b) {
        out << b << ',' << (b < hist.clean.size() ? hist.clean[b] : 0) << ','
            << (b < hist.noisy.size() ? hist.noisy[b] : 0) << "\n";
    }
    if (!out) throw std::runtime_error("histogram write failed: " + path);
}

}  // namespace lnl
