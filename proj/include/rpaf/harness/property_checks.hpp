#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rpaf/prediction/penalty.hpp"
#include "rpaf/sim/sim_config.hpp"

namespace rpaf::harness {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct PropertyCheckOptions {
  std::uint64_t seed = 7;
  std::size_t oracle_vectors = 200;  // per n
  std::size_t oracle_max_n = 12;
  std::size_t jensen_batches = 1000;
  std::size_t jensen_batch_size = 256;
  std::size_t gradient_nets = 20;
  std::size_t budget_seeds = 2;
  std::size_t budget_hours = 48;
  bool corrupt_rank_array = false;  // negative control for rank consistency
  sim::SimConfig sim;
};

/// Top-M selection equals the best subset found by enumeration, n <= max_n.
CheckResult check_oracle_equivalence(const PropertyCheckOptions& options);
/// Minimizer of -Q(s, a) + alpha T(a, m) over a 1e-3 grid is non-decreasing in Q1 - Q0.
CheckResult check_monotonicity(const PropertyCheckOptions& options);
/// T(mean a, m) <= mean T(a, m) on random batches, both penalties.
CheckResult check_jensen(const PropertyCheckOptions& options);
/// Actor and critic loss gradients against central differences.
CheckResult check_gradients(const PropertyCheckOptions& options);
/// Hourly real-time serves never exceed M under any budgeted method.
CheckResult check_budget_strictness(const PropertyCheckOptions& options);
/// Streaming ranks agree with sorted ranks up to the query's own bucket.
CheckResult check_rank_consistency(const PropertyCheckOptions& options);

std::vector<CheckResult> run_property_checks(const PropertyCheckOptions& options);
bool all_passed(const std::vector<CheckResult>& results);
std::string format_checks(const std::vector<CheckResult>& results);

/// Grid minimizer of -(a q1 + (1 - a) q0) + alpha T(a, m) over a in [0, 1]
/// (open interval for KL), step `grid`.
double relaxed_minimizer(double q0, double q1, double m, const prediction::Penalty& penalty,
                         double grid);

}  // namespace rpaf::harness
