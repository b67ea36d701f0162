#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rpaf::nn {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment accumulators for one parameter vector.
struct AdamState {
  AdamConfig config;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step = 0;

  AdamState() = default;
  AdamState(std::size_t parameter_count, AdamConfig cfg);
};

/// One bias-corrected Adam update. Throws std::invalid_argument when the
/// parameter, gradient and accumulator sizes disagree.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

}  // namespace rpaf::nn
