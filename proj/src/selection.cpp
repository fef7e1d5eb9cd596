#include "lnl/selection.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace lnl {

MemoryBank::MemoryBank(std::size_t n, std::size_t capacity, bool store_distributions)
    : n_(n), capacity_(capacity), store_distributions_(store_distributions) {
    if (n == 0) throw std::invalid_argument("MemoryBank: need at least one example");
    if (capacity == 0) throw std::invalid_argument("MemoryBank: capacity must be positive");
    slots_.assign(capacity, std::vector<int32_t>(n, -1));
    if (store_distributions_) dist_slots_.assign(capacity, Matrix());
}

void MemoryBank::record_epoch(std::span<const int32_t> preds) {
    if (preds.size() != n_) {
        throw std::invalid_argument("MemoryBank::record_epoch: prediction count does not match bank size");
    }
    slots_[next_].assign(preds.begin(), preds.end());
    if (store_distributions_) dist_slots_[next_] = Matrix();
    next_ = (next_ + 1) % capacity_;
    if (fill_ < capacity_) ++fill_;
}

void MemoryBank::record_epoch(const Matrix& probs) {
    if (probs.rows() != n_) {
        throw std::invalid_argument("MemoryBank::record_epoch: probability rows do not match bank size");
    }
    std::vector<int32_t>& slot = slots_[next_];
    for (std::size_t i = 0; i < n_; ++i) {
        const auto r = probs.row(i);
        std::size_t best = 0;
        for (std::size_t c = 1; c < r.size(); ++c) {
            if (r[c] > r[best]) best = c;
        }
        slot[i] = static_cast<int32_t>(best);
    }
    if (store_distributions_) dist_slots_[next_] = probs;
    next_ = (next_ + 1) % capacity_;
    if (fill_ < capacity_) ++fill_;
}

int32_t MemoryBank::label_at(std::size_t example, std::size_t t) const {
    if (example >= n_ || t >= fill_) {
        throw std::out_of_range("MemoryBank::label_at: index out of range");
    }
    return slots_[slot(t)][example];
}

std::vector<int32_t> MemoryBank::history(std::size_t example) const {
    if (example >= n_) throw std::out_of_range("MemoryBank::history: example out of range");
    std::vector<int32_t> out(fill_);
    for (std::size_t t = 0; t < fill_; ++t) out[t] = slots_[slot(t)][example];
    return out;
}

const Matrix* MemoryBank::distribution(std::size_t t) const {
    if (!store_distributions_ || t >= fill_) return nullptr;
    const Matrix& m = dist_slots_[slot(t)];
    return m.empty() ? nullptr : &m;
}

void MemoryBank::dump_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open bank dump for writing: " + path);
    out << "index";
    for (std::size_t t = 0; t < fill_; ++t) out << ",t" << t;
    out << "\n";
    for (std::size_t i = 0; i < n_; ++i) {
        out << i;
        for (std::size_t t = 0; t < fill_; ++t) out << ',' << slots_[slot(t)][i];
        out << "\n";
    }
    if (!out) throw std::runtime_error("bank dump write failed: " + path);
}

void MemoryBank::dump_binary(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open bank dump for writing: " + path);
    const uint64_t n = n_, fill = fill_;
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&fill), sizeof fill);
    for (std::size_t t = 0; t < fill_; ++t) {
        out.write(reinterpret_cast<const char*>(slots_[slot(t)].data()),
                  static_cast<std::streamsize>(n_ * sizeof(int32_t)));
    }
    if (!out) throw std::runtime_error("bank dump write failed: " + path);
}

bool fluctuation_flag(std::span<const int32_t> history, int32_t given) {
    if (history.size() < 2) return false;
    bool seen_correct = false;
    for (int32_t pred : history) {
        if (seen_correct && pred != given) return true;
        if (pred == given) seen_correct = true;
    }
    return false;
}

int count_fluctuations(std::span<const int32_t> log, int32_t given) {
    int count = 0;
    for (std::size_t t = 0; t + 1 < log.size(); ++t) {
        if (log[t] == given && log[t + 1] != given) ++count;
    }
    return count;
}

void score_selection(SelectionReport& report, std::span<const uint8_t> noise_mask) {
    if (noise_mask.empty()) return;
    if (noise_mask.size() != report.rejected.size()) {
        throw std::invalid_argument("score_selection: mask length does not match report");
    }
    std::size_t clean_total = 0;
    for (uint8_t m : noise_mask) clean_total += m == 0;
    std::size_t selected_clean = 0;
    for (std::size_t idx : report.selected) {
        if (noise_mask[idx] == 0) ++selected_clean;
    }
    report.n_selected = report.selected.size();
    report.n_selected_clean = selected_clean;
    report.empty_selection = report.selected.empty();
    report.precision = report.selected.empty()
                           ? 1.0
                           : static_cast<double>(selected_clean) / static_cast<double>(report.selected.size());
    report.recall = clean_total == 0
                        ? 1.0
                        : static_cast<double>(selected_clean) / static_cast<double>(clean_total);
    const double pr = report.precision + report.recall;
    report.f_score = pr == 0.0 ? 0.0 : 2.0 * report.precision * report.recall / pr;
    report.scored = true;
}

namespace {

SelectionReport report_from_rejection(std::vector<uint8_t> rejected,
                                      std::span<const uint8_t> noise_mask) {
    SelectionReport report;
    report.rejected = std::move(rejected);
    report.selected.reserve(report.rejected.size());
    for (std::size_t i = 0; i < report.rejected.size(); ++i) {
        if (!report.rejected[i]) report.selected.push_back(i);
    }
    report.n_selected = report.selected.size();
    score_selection(report, noise_mask);
    return report;
}

}  // namespace

SelectionReport select_fluctuation(const MemoryBank& bank, std::span<const int32_t> given_labels,
                                   std::span<const uint8_t> noise_mask) {
    if (given_labels.size() != bank.size()) {
        throw std::invalid_argument("select_fluctuation: label count does not match bank");
    }
    if (bank.fill() < 2) {
        throw not_ready_error("select_fluctuation: bank holds fewer than two epochs");
    }
    std::vector<uint8_t> rejected(bank.size(), 0);
    std::vector<int32_t> history;
    for (std::size_t i = 0; i < bank.size(); ++i) {
        history = bank.history(i);
        rejected[i] = fluctuation_flag(history, given_labels[i]) ? 1 : 0;
    }
    return report_from_rejection(std::move(rejected), noise_mask);
}

SelectionReport select_small_loss(std::span<const double> losses, double assumed_noise_ratio,
                                  std::span<const uint8_t> noise_mask) {
    if (assumed_noise_ratio < 0.0 || assumed_noise_ratio >= 1.0) {
        throw std::invalid_argument("select_small_loss: assumed_noise_ratio must be in [0, 1)");
    }
    const std::size_t n = losses.size();
    const std::size_t keep =
        static_cast<std::size_t>(std::floor((1.0 - assumed_noise_ratio) * static_cast<double>(n)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (losses[a] != losses[b]) return losses[a] < losses[b];
        return a < b;
    });
    std::vector<uint8_t> rejected(n, 1);
    for (std::size_t r = 0; r < keep && r < n; ++r) rejected[order[r]] = 0;
    return report_from_rejection(std::move(rejected), noise_mask);
}

SelectionReport select_voting(const MemoryBank& bank, std::span<const int32_t> given_labels,
                              std::span<const uint8_t> noise_mask) {
    if (given_labels.size() != bank.size()) {
        throw std::invalid_argument("select_voting: label count does not match bank");
    }
    if (bank.fill() < 1) {
        throw not_ready_error("select_voting: bank is empty");
    }
    std::vector<uint8_t> rejected(bank.size(), 0);
    for (std::size_t i = 0; i < bank.size(); ++i) {
        std::size_t agree = 0;
        for (std::size_t t = 0; t < bank.fill(); ++t) {
            if (bank.label_at(i, t) == given_labels[i]) ++agree;
        }
        // Strict majority; an exact tie on even fill rejects.
        rejected[i] = (2 * agree > bank.fill()) ? 0 : 1;
    }
    return report_from_rejection(std::move(rejected), noise_mask);
}

SelectionReport select_all(std::size_t n, std::span<const uint8_t> noise_mask) {
    return report_from_rejection(std::vector<uint8_t>(n, 0), noise_mask);
}

void write_report_json(const SelectionReport& report, const std::string& path) {
    nlohmann::json j;
    j["n_selected"] = report.n_selected;
    j["n_selected_clean"] = report.n_selected_clean;
    j["precision"] = report.precision;
    j["recall"] = report.recall;
    j["f_score"] = report.f_score;
    j["empty_selection"] = report.empty_selection;
    j["scored"] = report.scored;
    j["selected"] = report.selected;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open report for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("report write failed: " + path);
}

}  // namespace lnl
