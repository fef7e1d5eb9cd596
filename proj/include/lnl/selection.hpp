#pragma once

#include "lnl/matrix.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lnl {

// Raised when a criterion is asked to run before the bank holds enough
// history to express it.
class not_ready_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// FIFO store of the last `capacity` epochs of per-example predicted labels.
// Slot order is a ring over whole epochs: record_epoch appends one epoch of
// predictions for every example and evicts the oldest epoch once full.
// Optionally keeps the full probability rows of the stored epochs for
// debugging; selection itself only ever reads the argmax labels.
class MemoryBank {
public:
    MemoryBank() = default;
    MemoryBank(std::size_t n, std::size_t capacity, bool store_distributions = false);

    std::size_t size() const { return n_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t fill() const { return fill_; }
    bool stores_distributions() const { return store_distributions_; }

    void record_epoch(std::span<const int32_t> preds);
    // Records per-row argmax; keeps the probability rows too when enabled.
    void record_epoch(const Matrix& probs);

    // t = 0 is the oldest stored epoch, t = fill()-1 the newest.
    int32_t label_at(std::size_t example, std::size_t t) const;
    std::vector<int32_t> history(std::size_t example) const;

    // Stored probability matrix of epoch t, or nullptr when disabled.
    const Matrix* distribution(std::size_t t) const;

    // n rows x fill() label columns, oldest epoch first.
    void dump_csv(const std::string& path) const;
    void dump_binary(const std::string& path) const;

private:
    std::size_t slot(std::size_t t) const { return (next_ + capacity_ - fill_ + t) % capacity_; }

    std::size_t n_ = 0;
    std::size_t capacity_ = 0;
    std::size_t fill_ = 0;
    std::size_t next_ = 0;
    bool store_distributions_ = false;
    std::vector<std::vector<int32_t>> slots_;  // capacity_ epochs, each of length n_
    std::vector<Matrix> dist_slots_;
};

// True iff some prediction equal to `given` is followed, later in the
// window, by a prediction different from it. Histories shorter than two
// cannot express the event and report false (sample retained).
bool fluctuation_flag(std::span<const int32_t> history, int32_t given);

// Number of adjacent correct-to-wrong transitions over a full training log.
int count_fluctuations(std::span<const int32_t> log, int32_t given);

struct SelectionReport {
    std::vector<std::size_t> selected;  // ascending indices
    std::vector<uint8_t> rejected;      // per-example flag, 1 = filtered out
    std::size_t n_selected = 0;
    std::size_t n_selected_clean = 0;
    double precision = 1.0;
    double recall = 1.0;
    double f_score = 1.0;
    bool empty_selection = false;  // precision defaulted to 1 by convention
    bool scored = false;           // quality fields populated from a mask
};

// Fills precision/recall/F against a ground-truth noise mask (1 = noisy).
void score_selection(SelectionReport& report, std::span<const uint8_t> noise_mask);

// Keeps every example whose window holds no fluctuation event. Requires
// fill >= 2, otherwise throws not_ready_error.
SelectionReport select_fluctuation(const MemoryBank& bank, std::span<const int32_t> given_labels,
                                   std::span<const uint8_t> noise_mask = {});

// Keeps the floor((1 - assumed_noise_ratio) * n) examples with the smallest
// losses; ties broken by index ascending.
SelectionReport select_small_loss(std::span<const double> losses, double assumed_noise_ratio,
                                  std::span<const uint8_t> noise_mask = {});

// Keeps an example iff strictly more than half of its stored predictions
// equal the given label. Requires fill >= 1. Even-fill ties reject.
SelectionReport select_voting(const MemoryBank& bank, std::span<const int32_t> given_labels,
                              std::span<const uint8_t> noise_mask = {});

// The no-op criterion: keeps everything.
SelectionReport select_all(std::size_t n, std::span<const uint8_t> noise_mask = {});

void write_report_json(const SelectionReport& report, const std::string& path);

}  // namespace lnl
