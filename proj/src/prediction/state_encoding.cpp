#include "rpaf/prediction/state_encoding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rpaf::prediction {

std::size_t state_dim(const sim::SimConfig& config) { return config.preference_dim + 4; }

std::vector<double> encode_state(const sim::UserSessionState& user, const sim::SimConfig& config) {
  std::vector<double> x;
  x.reserve(state_dim(config));
  x.insert(x.end(), user.preference.begin(), user.preference.end());
  x.resize(config.preference_dim, 0.0);

  const double max_cached = static_cast<double>(std::max<std::size_t>(1, config.max_consecutive_cached()));
  x.push_back(static_cast<double>(user.consecutive_cached) / max_cached);
  x.push_back(static_cast<double>(user.cache_occupancy) / static_cast<double>(config.cache_capacity()));

  const double phase = 2.0 * std::numbers::pi * static_cast<double>(user.hour_of_day % 24) / 24.0;
  x.push_back(std::sin(phase));
  x.push_back(std::cos(phase));
  return x;
}

}  // namespace rpaf::prediction
