#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rpaf/allocation/budget_ledger.hpp"

namespace rpaf::allocation {

/// 1 for exactly the M largest values, ties going to the lower index.
/// Throws std::invalid_argument when M exceeds the number of values.
std::vector<int> batch_oracle(std::span<const double> values, std::size_t budget);

/// Real time while the period's quota lasts; consumes one unit when it admits.
int greedy_allocator(BudgetLedger& ledger);

/// Always real time. Deliberately ignores any ledger.
constexpr int all_realtime_allocator() { return 1; }

}  // namespace rpaf::allocation
