#include "rpaf/sim/sim_config.hpp"

#include <cmath>
#include <numbers>

namespace rpaf::sim {

void SimConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(num_users > 0, "num_users must be positive");
  require(slate_size > 0, "slate_size must be positive");
  require(realtime_return > slate_size, "realtime_return must exceed slate_size");
  require(hourly_budget > 0, "hourly_budget must be positive");
  require(hours > 0, "hours must be positive");
  require(traffic_min <= traffic_max, "traffic_min must not exceed traffic_max");
  require(traffic_max > 0, "traffic_max must be positive");
  require(staleness_floor > 0.0 && staleness_floor <= 1.0, "staleness_floor must be in (0, 1]");
  require(staleness_slope >= 0.0, "staleness_slope must be non-negative");
  require(std::isfinite(leave_sensitivity) && std::isfinite(leave_bias),
          "leave parameters must be finite");
  require(preference_dim > 0, "preference_dim must be positive");
  require(item_noise >= 0.0 && popularity_strength >= 0.0, "item parameters must be non-negative");
  require(seconds_per_unit > 0.0, "seconds_per_unit must be positive");
}

std::size_t traffic_at(const SimConfig& config, std::size_t hour) {
  const double s = std::sin(std::numbers::pi * static_cast<double>(hour) / 24.0);
  const double lo = static_cast<double>(config.traffic_min);
  const double hi = static_cast<double>(config.traffic_max);
  return static_cast<std::size_t>(std::llround(lo + (hi - lo) * s * s));
}

}  // namespace rpaf::sim
