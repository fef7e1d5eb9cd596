#include "lnl/dataset.hpp"
#include "lnl/experiment.hpp"
#include "lnl/trainer.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

// Shared config resolution: file, then --set overrides, then the dedicated
// flags (later wins).
lnl::ExperimentSpec resolve_spec(const std::string& config_path,
                                 const std::vector<std::string>& overrides,
                                 const std::string& out_dir, long seed, int repeats) {
    lnl::ConfigMap cfg;
    if (!config_path.empty()) cfg = lnl::parse_config_file(config_path);
    for (const std::string& kv : overrides) lnl::apply_override(cfg, kv);
    if (!out_dir.empty()) cfg["out_dir"] = out_dir;
    if (seed >= 0) cfg["seed"] = std::to_string(seed);
    if (repeats > 0) cfg["repeats"] = std::to_string(repeats);
    return lnl::spec_from_config(cfg);
}

int cmd_generate(const lnl::ExperimentSpec& spec) {
    const lnl::PreparedData data = lnl::prepare_data(spec.dataset, spec.noise);
    fs::create_directories(spec.out_dir);
    lnl::save_dataset(data.train, (fs::path(spec.out_dir) / "train.bin").string());
    lnl::save_dataset(data.test, (fs::path(spec.out_dir) / "test.bin").string());
    lnl::write_audit_csv(data.train, (fs::path(spec.out_dir) / "audit.csv").string());
    lnl::write_config_file(lnl::config_from_spec(spec),
                           (fs::path(spec.out_dir) / "config.txt").string());
    std::printf("wrote %zu train / %zu test examples to %s (noise %s, realized fraction %.4f)\n",
                data.train.n(), data.test.n(), spec.out_dir.c_str(),
                lnl::noise_kind_name(data.train.kind), data.train.realized_noise_fraction());
    return 0;
}

int cmd_train(const lnl::ExperimentSpec& spec, const std::string& data_dir) {
    lnl::ExperimentResult result;
    if (data_dir.empty()) {
        result = lnl::run_experiment(spec, /*write_outputs=*/true);
    } else {
        const lnl::NoisyDataset train =
            lnl::load_dataset((fs::path(data_dir) / "train.bin").string());
        const lnl::NoisyDataset test = lnl::load_dataset((fs::path(data_dir) / "test.bin").string());
        result = lnl::run_experiment_on_data(spec, train, test, /*write_outputs=*/true);
    }
    std::printf("final test accuracy: %.4f (+/- %.4f over %zu repeats)\n", result.mean_final_acc,
                result.std_final_acc, result.repeats.size());
    std::printf("final selection F-score: %.4f (+/- %.4f)\n", result.mean_final_f1,
                result.std_final_f1);
    int fallbacks = 0;
    for (const auto& r : result.repeats) fallbacks += r.fallback_epochs;
    if (fallbacks > 0) {
        std::fprintf(stderr, "warning: %d epoch(s) recovered from an empty selection\n", fallbacks);
    }
    return 0;
}

int cmd_histogram(const std::string& predictions_path, const std::string& audit_path,
                  const std::string& out_path) {
    const lnl::PredictionLog log = lnl::load_prediction_log_csv(predictions_path);
    const lnl::AuditColumns audit = lnl::load_audit_csv(audit_path);
    if (audit.given_labels.size() != log.n) {
        throw std::runtime_error("audit csv and prediction log disagree on example count");
    }
    const lnl::FluctuationHistogram hist =
        lnl::fluctuation_histogram(log, audit.given_labels, audit.noise_mask);
    lnl::write_histogram_csv(hist, out_path);
    std::printf("mean fluctuation count: clean %.4f, noisy %.4f\n", hist.clean_mean,
                hist.noisy_mean);
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& overrides,
              const std::string& out_dir, long seed, int repeats, const std::string& param,
              const std::vector<std::string>& values) {
    if (values.empty()) throw std::runtime_error("sweep: no values given");
    const std::string root =
        out_dir.empty() ? resolve_spec(config_path, overrides, "", seed, repeats).out_dir : out_dir;
    fs::create_directories(root);

    std::ofstream table((fs::path(root) / "sweep.csv").string());
    if (!table) throw std::runtime_error("cannot open sweep.csv for writing");
    table << "param,value,mean_final_acc,std_final_acc,mean_final_f1,std_final_f1\n";
    char buf[64];
    for (const std::string& value : values) {
        std::vector<std::string> with_value = overrides;
        with_value.push_back(param + "=" + value);
        const std::string sub = (fs::path(root) / (param + "=" + value)).string();
        const lnl::ExperimentSpec spec = resolve_spec(config_path, with_value, sub, seed, repeats);
        const lnl::ExperimentResult result = lnl::run_experiment(spec, /*write_outputs=*/true);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g", result.mean_final_acc,
                      result.std_final_acc, result.mean_final_f1, result.std_final_f1);
        table << param << ',' << value << ',' << buf << "\n";
        std::printf("%s = %s -> acc %.4f, f1 %.4f\n", param.c_str(), value.c_str(),
                    result.mean_final_acc, result.mean_final_f1);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noisy-label training lab: fluctuation-based sample selection experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir, data_dir;
    std::vector<std::string> overrides;
    long seed = -1;
    int repeats = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config file (key = value lines)");
        sub->add_option("--set", overrides, "override a config key, e.g. --set noise.noise_ratio=0.2")
            ->take_all();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "base seed for dataset/noise/train");
        sub->add_option("--repeats", repeats, "number of repeats with shifted seeds");
    };

    CLI::App* generate = app.add_subcommand("generate", "write train/test splits and the noise audit CSV");
    add_common(generate);

    CLI::App* train = app.add_subcommand("train", "run an experiment and write metrics + summary");
    add_common(train);
    train->add_option("--data", data_dir, "directory with train.bin/test.bin from `generate`");

    std::string predictions_path, audit_path, hist_out;
    CLI::App* histogram =
        app.add_subcommand("histogram", "fluctuation-count distribution of clean vs noisy examples");
    histogram->add_option("--predictions", predictions_path,
                          "predictions.csv from a run with train.record_full_log=true")
        ->required();
    histogram->add_option("--audit", audit_path, "audit.csv of the same run")->required();
    histogram->add_option("--out", hist_out, "output histogram CSV")->required();

    std::string sweep_param;
    std::vector<std::string> sweep_values;
    CLI::App* sweep = app.add_subcommand("sweep", "run one experiment per value of a config key");
    add_common(sweep);
    sweep->add_option("--param", sweep_param, "config key to sweep")->required();
    sweep->add_option("--values", sweep_values, "comma/space separated values")
        ->required()
        ->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            return cmd_generate(resolve_spec(config_path, overrides, out_dir, seed, repeats));
        }
        if (train->parsed()) {
            return cmd_train(resolve_spec(config_path, overrides, out_dir, seed, repeats), data_dir);
        }
        if (histogram->parsed()) {
            return cmd_histogram(predictions_path, audit_path, hist_out);
        }
        if (sweep->parsed()) {
            return cmd_sweep(config_path, overrides, out_dir, seed, repeats, sweep_param,
                             sweep_values);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
