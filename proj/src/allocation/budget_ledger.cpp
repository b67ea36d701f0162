#include "rpaf/allocation/budget_ledger.hpp"

#include <stdexcept>

namespace rpaf::allocation {

BudgetLedger::BudgetLedger(std::size_t budget, std::uint64_t period) : budget_(budget) {
  if (budget == 0) throw std::invalid_argument("BudgetLedger: budget must be positive");
  period_.store(period);
}

bool BudgetLedger::try_consume() {
  std::size_t current = consumed_.load(std::memory_order_relaxed);
  while (current < budget_) {
    if (consumed_.compare_exchange_weak(current, current + 1, std::memory_order_acq_rel,
                                        std::memory_order_relaxed)) {
      return true;
    }
  }
  return false;
}

void BudgetLedger::reset(std::uint64_t period) {
  consumed_.store(0, std::memory_order_release);
  period_.store(period, std::memory_order_release);
}

}  // namespace rpaf::allocation
