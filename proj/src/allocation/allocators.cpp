#include "rpaf/allocation/allocators.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rpaf::allocation {

std::vector<int> batch_oracle(std::span<const double> values, std::size_t budget) {
  if (budget > values.size()) throw std::invalid_argument("batch_oracle: M exceeds value count");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<int> chosen(values.size(), 0);
  for (std::size_t k = 0; k < budget; ++k) chosen[order[k]] = 1;
  return chosen;
}

int greedy_allocator(BudgetLedger& ledger) { return ledger.try_consume() ? 1 : 0; }

}  // namespace rpaf::allocation
