#include "lnl/trainer.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lnl {

const char* selector_name(Selector s) {
    switch (s) {
        case Selector::Fluctuation: return "fluctuation";
        case Selector::SmallLoss: return "small_loss";
        case Selector::Voting: return "voting";
        case Selector::None: return "none";
    }
    return "unknown";
}

Selector selector_from_name(const std::string& name) {
    if (name == "fluctuation") return Selector::Fluctuation;
    if (name == "small_loss") return Selector::SmallLoss;
    if (name == "voting") return Selector::Voting;
    if (name == "none") return Selector::None;
    throw std::invalid_argument("unknown selector: " + name);
}

void TrainConfig::validate() const {
    if (warmup_epochs < 0) throw std::invalid_argument("TrainConfig.warmup_epochs must be >= 0");
    if (total_epochs <= warmup_epochs) {
        throw std::invalid_argument("TrainConfig.total_epochs must exceed warmup_epochs");
    }
    if (bank_capacity < 1) throw std::invalid_argument("TrainConfig.bank_capacity must be >= 1");
    if (selector == Selector::Fluctuation && bank_capacity < 2) {
        throw std::invalid_argument("TrainConfig.bank_capacity must be >= 2 for the fluctuation selector");
    }
    if (eval_every < 1) throw std::invalid_argument("TrainConfig.eval_every must be >= 1");
    if (assumed_noise_ratio < 0.0 || assumed_noise_ratio >= 1.0) {
        throw std::invalid_argument("TrainConfig.assumed_noise_ratio must be in [0, 1)");
    }
    if (hidden.empty()) throw std::invalid_argument("TrainConfig.hidden must name at least one layer");
    for (int h : hidden) {
        if (h <= 0) throw std::invalid_argument("TrainConfig.hidden widths must be positive");
    }
    loss.validate();
    opt.validate();
}

double evaluate(const ModelState& model, const NoisyDataset& test) {
    if (test.n() == 0) throw std::invalid_argument("evaluate: empty test set");
    const std::vector<int32_t> preds = predict(model, test.features);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] == test.true_labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(preds.size());
}

namespace {

std::vector<int> model_widths(const TrainConfig& cfg, std::size_t input_dim, int32_t num_classes) {
    std::vector<int> widths;
    widths.push_back(static_cast<int>(input_dim));
    widths.insert(widths.end(), cfg.hidden.begin(), cfg.hidden.end());
    widths.push_back(num_classes);
    return widths;
}

}  // namespace

Trainer::Trainer(const TrainConfig& cfg, const NoisyDataset& train, const NoisyDataset& test)
    : cfg_(cfg),
      train_(train),
      test_(test),
      rng_(cfg.seed),
      bank_(train.n(), static_cast<std::size_t>(cfg.bank_capacity)) {
    cfg_.validate();
    train_.validate();
    test_.validate();
    if (train_.n() == 0) throw std::invalid_argument("Trainer: empty training set");
    if (test_.n() == 0) throw std::invalid_argument("Trainer: empty test set");
    if (train_.features.cols() != test_.features.cols()) {
        throw std::invalid_argument("Trainer: train and test feature widths differ");
    }
    model_ = ModelState(model_widths(cfg_, train_.features.cols(), train_.num_classes), rng_);
    full_log_.n = train_.n();
}

double Trainer::train_one_epoch(const std::vector<std::size_t>& pool, const LossConfig& loss_cfg,
                                int epoch, LossBreakdown* mean_loss) {
    std::vector<std::size_t> order = pool;
    std::shuffle(order.begin(), order.end(), rng_);

    const std::size_t batch_size = static_cast<std::size_t>(cfg_.opt.batch_size);
    const std::size_t dim = train_.features.cols();
    LossBreakdown accum;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const std::size_t count = std::min(batch_size, order.size() - start);
        Matrix batch(count, dim);
        std::vector<int32_t> labels(count);
        for (std::size_t b = 0; b < count; ++b) {
            const std::size_t idx = order[start + b];
            const auto src = train_.features.row(idx);
            std::copy(src.begin(), src.end(), batch.row(b).begin());
            labels[b] = train_.given_labels[idx];
        }
        BackwardResult back = backward(model_, batch, labels, loss_cfg);
        sgd_step(model_, back.grads, cfg_.opt, epoch);
        LossBreakdown weighted = back.loss;
        weighted *= static_cast<double>(count);
        accum += weighted;
    }
    if (!order.empty()) accum *= 1.0 / static_cast<double>(order.size());
    if (mean_loss != nullptr) *mean_loss = accum;
    return accum.total;
}

void Trainer::record_bank() {
    const std::vector<int32_t> preds = predict(model_, train_.features);
    bank_.record_epoch(std::span<const int32_t>(preds));
    if (cfg_.record_full_log) full_log_.epochs.push_back(preds);
}

std::vector<double> Trainer::per_example_ce() const {
    const Matrix probs = forward(model_, train_.features);
    std::vector<double> losses(train_.n());
    for (std::size_t i = 0; i < train_.n(); ++i) {
        losses[i] = cross_entropy(probs.row(i), train_.given_labels[i]);
    }
    return losses;
}

SelectionReport Trainer::select(int epoch, bool* fallback) {
    (void)epoch;
    *fallback = false;
    const std::span<const uint8_t> mask(train_.noise_mask);
    const std::span<const int32_t> given(train_.given_labels);

    SelectionReport report;
    switch (cfg_.selector) {
        case Selector::Fluctuation:
            if (bank_.fill() < 2) {
                report = select_all(train_.n(), mask);  // bank not ready: keep everything
            } else {
                report = select_fluctuation(bank_, given, mask);
            }
            break;
        case Selector::SmallLoss: {
            const std::vector<double> losses = per_example_ce();
            report = select_small_loss(losses, cfg_.assumed_noise_ratio, mask);
            break;
        }
        case Selector::Voting:
            if (bank_.fill() < 1) {
                report = select_all(train_.n(), mask);
            } else {
                report = select_voting(bank_, given, mask);
            }
            break;
        case Selector::None:
            report = select_all(train_.n(), mask);
            break;
    }
    if (report.selected.empty()) {
        report = select_all(train_.n(), mask);
        *fallback = true;
        ++fallback_epochs_;
    }
    return report;
}

EpochMetrics Trainer::fill_metrics(int epoch, const SelectionReport& report,
                                   const LossBreakdown& loss, bool fallback) {
    EpochMetrics m;
    m.epoch = epoch;
    m.loss_ce = loss.ce;
    m.loss_reg = loss.total - loss.ce;
    m.loss_total = loss.total;
    if ((epoch + 1) % cfg_.eval_every == 0 || epoch + 1 == cfg_.total_epochs) {
        last_test_acc_ = evaluate(model_, test_);
    }
    m.test_acc = last_test_acc_;
    m.sel_precision = report.precision;
    m.sel_recall = report.recall;
    m.sel_f1 = report.f_score;
    m.n_selected = report.n_selected;
    m.n_selected_clean = report.n_selected_clean;
    m.lr = effective_learning_rate(cfg_.opt, epoch);
    m.sel_fallback = fallback;
    return m;
}

EpochMetrics Trainer::warmup_epoch(int epoch) {
    std::vector<std::size_t> pool(train_.n());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    LossConfig warmup_cfg = cfg_.loss;
    warmup_cfg.stage = Stage::Warmup;
    LossBreakdown loss;
    train_one_epoch(pool, warmup_cfg, epoch, &loss);
    record_bank();
    // No filtering yet: report the whole set as selected.
    return fill_metrics(epoch, select_all(train_.n(), train_.noise_mask), loss, false);
}

EpochMetrics Trainer::main_epoch(int epoch) {
    bool fallback = false;
    const SelectionReport report = select(epoch, &fallback);

    LossConfig main_cfg = cfg_.loss;
    if (main_cfg.stage == Stage::Warmup) main_cfg.stage = Stage::Main;
    LossBreakdown loss;
    train_one_epoch(report.selected, main_cfg, epoch, &loss);
    record_bank();
    return fill_metrics(epoch, report, loss, fallback);
}

RunResult Trainer::run() {
    std::vector<EpochMetrics> metrics;
    metrics.reserve(static_cast<std::size_t>(cfg_.total_epochs));

    for (int epoch = 0; epoch < cfg_.total_epochs; ++epoch) {
        metrics.push_back(epoch < cfg_.warmup_epochs ? warmup_epoch(epoch) : main_epoch(epoch));
    }

    RunResult result;
    result.metrics = std::move(metrics);
    result.model = model_;
    result.bank = bank_;
    result.full_log = full_log_;
    result.fallback_epochs = fallback_epochs_;
    return result;
}

RunResult run(const TrainConfig& cfg, const NoisyDataset& train, const NoisyDataset& test) {
    Trainer trainer(cfg, train, test);
    return trainer.run();
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_metrics_csv(const std::vector<EpochMetrics>& metrics, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open metrics csv for writing: " + path);
    out << "epoch,loss_ce,loss_reg,loss_total,test_acc,sel_precision,sel_recall,sel_f1,"
           "n_selected,n_selected_clean,lr\n";
    for (const EpochMetrics& m : metrics) {
        out << m.epoch << ',' << fmt_double(m.loss_ce) << ',' << fmt_double(m.loss_reg) << ','
            << fmt_double(m.loss_total) << ',' << fmt_double(m.test_acc) << ','
            << fmt_double(m.sel_precision) << ',' << fmt_double(m.sel_recall) << ','
            << fmt_double(m.sel_f1) << ',' << m.n_selected << ',' << m.n_selected_clean << ','
            << fmt_double(m.lr) << "\n";
    }
    if (!out) throw std::runtime_error("metrics csv write failed: " + path);
}

void write_metrics_jsonl(const std::vector<EpochMetrics>& metrics, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open metrics jsonl for writing: " + path);
    for (const EpochMetrics& m : metrics) {
        nlohmann::json j;
        j["epoch"] = m.epoch;
        j["loss_ce"] = m.loss_ce;
        j["loss_reg"] = m.loss_reg;
        j["loss_total"] = m.loss_total;
        j["test_acc"] = m.test_acc;
        j["sel_precision"] = m.sel_precision;
        j["sel_recall"] = m.sel_recall;
        j["sel_f1"] = m.sel_f1;
        j["n_selected"] = m.n_selected;
        j["n_selected_clean"] = m.n_selected_clean;
        j["lr"] = m.lr;
        out << j.dump() << "\n";
    }
    if (!out) throw std::runtime_error("metrics jsonl write failed: " + path);
}

void write_prediction_log_csv(const PredictionLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open prediction log for writing: " + path);
    out << "index";
    for (std::size_t e = 0; e < log.epochs.size(); ++e) out << ",e" << e;
    out << "\n";
    for (std::size_t i = 0; i < log.n; ++i) {
        out << i;
        for (const auto& epoch : log.epochs) out << ',' << epoch[i];
        out << "\n";
    }
    if (!out) throw std::runtime_error("prediction log write failed: " + path);
}

PredictionLog load_prediction_log_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open prediction log: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("prediction log empty: " + path);
    std::size_t columns = 0;
    for (char c : line) columns += c == ',';
    PredictionLog log;
    log.epochs.assign(columns, {});
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        if (!std::getline(ss, cell, ',')) break;  // index column
        for (std::size_t e = 0; e < columns; ++e) {
            if (!std::getline(ss, cell, ',')) {
                throw std::runtime_error("prediction log row too short: " + path);
            }
            log.epochs[e].push_back(static_cast<int32_t>(std::stol(cell)));
        }
        ++rows;
    }
    log.n = rows;
    return log;
}

}  // namespace lnl
