#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>

namespace rpaf::allocation {

/// Strict per-period quota of real-time serves.
///
/// try_consume() is lock-free and safe for concurrent callers; consumed never
/// exceeds the budget within a period.
class BudgetLedger {
 public:
  /// Throws std::invalid_argument for a zero budget.
  explicit BudgetLedger(std::size_t budget, std::uint64_t period = 0);

  /// Takes one unit of quota; false when the period's budget is exhausted.
  bool try_consume();

  std::size_t budget() const { return budget_; }
  std::size_t consumed() const { return consumed_.load(std::memory_order_acquire); }
  std::size_t remaining() const { return budget_ - consumed(); }
  std::uint64_t period() const { return period_.load(std::memory_order_acquire); }

  /// Starts `period` with nothing consumed.
  void reset(std::uint64_t period);

 private:
  std::size_t budget_;
  std::atomic<std::size_t> consumed_{0};
  std::atomic<std::uint64_t> period_{0};
};

}  // namespace rpaf::allocation
