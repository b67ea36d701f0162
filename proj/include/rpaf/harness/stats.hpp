#pragma once

#include <cstddef>
#include <span>

namespace rpaf::harness {

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single value
  std::size_t n = 0;
};

MeanStd mean_std(std::span<const double> values);

struct PairedTest {
  std::size_t n = 0;
  double mean_diff = 0.0;   // mean of a - b
  double t_statistic = 0.0;
  double p_two_sided = 1.0;
  double p_greater = 1.0;   // one-sided, alternative mean(a - b) > 0
};

/// Paired Student t-test on a - b. Throws std::invalid_argument when the
/// lengths differ or fewer than two pairs are given.
PairedTest paired_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace rpaf::harness
