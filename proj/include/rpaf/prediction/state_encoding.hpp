#pragma once

#include <cstddef>
#include <vector>

#include "rpaf/sim/sim_config.hpp"
#include "rpaf/sim/simulator.hpp"

namespace rpaf::prediction {

/// Length of encode_state's output: preference, staleness, occupancy and a
/// sine/cosine hour pair.
std::size_t state_dim(const sim::SimConfig& config);

/// [preference..., consecutive_cached / max_cached, occupancy / (L - K),
///  sin(2 pi h / 24), cos(2 pi h / 24)]
std::vector<double> encode_state(const sim::UserSessionState& user, const sim::SimConfig& config);

}  // namespace rpaf::prediction
