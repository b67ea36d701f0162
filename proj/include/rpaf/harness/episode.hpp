#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "rpaf/nn/dense_net.hpp"
#include "rpaf/prediction/replay_buffer.hpp"
#include "rpaf/sim/sim_config.hpp"

namespace rpaf::harness {

enum class Method { kGreedy, kAllRealtime, kOracleMyopic, kRpafNoPool, kRpaf };

/// Accepts greedy, all-realtime, oracle-myopic, rpaf-nopool, rpaf; throws
/// std::invalid_argument otherwise.
Method parse_method(std::string_view name);
std::string to_string(Method method);
bool uses_actor(Method method);
bool uses_ledger(Method method);

struct HourlyMetrics {
  std::size_t hour = 0;
  std::size_t requests = 0;
  std::size_t realtime = 0;
  std::size_t cached = 0;
  std::size_t failures = 0;
  std::size_t budget = 0;
  double watchtime = 0.0;  // seconds, summed over the hour
  double mean_atilde = 0.0;  // NaN for methods without an actor
};

struct EpisodeOptions {
  Method method = Method::kGreedy;
  double resolution = 0.001;           // PoolRank bucket width
  const nn::DenseNet* actor = nullptr;  // required by the rpaf methods

  // rpaf-nopool requests real time with probability a_tilde. By default
  // hours whose demand fits the quota (m_t = 1) are served in real time;
  // with `explore` every hour draws, as the data-collection policy does.
  bool explore = false;

  // Data collection hooks. Transitions are labelled with period
  // `period_offset + hour`; on_hour_end runs after the hour's last request.
  std::uint64_t period_offset = 0;
  std::function<void(prediction::Transition&&)> on_transition;
  std::function<void(std::size_t hour)> on_hour_end;
};

struct EpisodeResult {
  std::vector<HourlyMetrics> hours;
  double total_watch_time = 0.0;
  double watch_time_per_user = 0.0;
};

/// Simulates `config.hours` hours of traffic for one seed under one method.
/// Throws std::invalid_argument when an actor-based method has no actor.
EpisodeResult run_episode(const sim::SimConfig& config, const EpisodeOptions& options);

}  // namespace rpaf::harness
