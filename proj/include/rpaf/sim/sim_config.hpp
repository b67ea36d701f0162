#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rpaf::sim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters of the synthetic recommender-with-result-cache world.
///
/// One simulated period is one hour. Request volume follows a deterministic
/// day curve between `traffic_min` and `traffic_max`; every request is served
/// either in real time (L fresh items, top K shown, L-K cached) or from the
/// user's result cache (next K items, discounted by staleness).
struct SimConfig {
  std::size_t num_users = 200;
  std::size_t slate_size = 8;        // K
  std::size_t realtime_return = 40;  // L
  std::size_t hourly_budget = 225;   // M
  std::size_t hours = 168;
  std::size_t traffic_min = 50;
  std::size_t traffic_max = 400;

  // d(k) = max(floor, 1 - slope * k) for the k-th consecutive cached serve.
  double staleness_floor = 0.6;
  double staleness_slope = 0.1;

  // P(continue) = sigmoid(leave_sensitivity * watch_time - leave_bias).
  double leave_sensitivity = 0.05;
  double leave_bias = -0.5;

  std::size_t preference_dim = 8;
  double item_noise = 0.5;
  double popularity_strength = 1.0;
  double seconds_per_unit = 5.0;

  // The catalog (popular direction) is shared by every population; `seed`
  // draws the users, the traffic and all per-request randomness.
  std::uint64_t catalog_seed = 20240601;
  std::uint64_t seed = 1;

  std::size_t cache_capacity() const { return realtime_return - slate_size; }
  /// Most cached serves a full cache can supply before it runs dry.
  std::size_t max_consecutive_cached() const { return cache_capacity() / slate_size; }

  /// Throws ConfigError on the first violated invariant.
  void validate() const;
};

/// Requests arriving in `hour`: round(min + (max - min) * sin^2(pi * hour / 24)).
std::size_t traffic_at(const SimConfig& config, std::size_t hour);

}  // namespace rpaf::sim
