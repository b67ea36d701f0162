#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "rpaf/harness/episode.hpp"
#include "rpaf/prediction/trainer.hpp"
#include "rpaf/sim/sim_config.hpp"

namespace rpaf::harness {

/// Trainer defaults for simulator rewards: rewards are seconds, and a 0.025
/// scale keeps dQ near the penalty scale; from about 0.03 on the actor
/// saturates at 1 and every method degenerates to greedy.
inline prediction::TrainerConfig default_trainer_config() {
  prediction::TrainerConfig c;
  c.reward_scale = 0.025;
  return c;
}

/// Everything one `train` or `evaluate` invocation needs.
struct ExperimentConfig {
  sim::SimConfig sim;
  prediction::TrainerConfig trainer = default_trainer_config();
  Method method = Method::kRpaf;
  std::size_t trials = 20;
  std::string output_dir = "out";
  double resolution = 0.001;  // PoolRank bucket width

  // Training schedule: each epoch simulates one full horizon on a fresh
  // population and runs `train_steps_per_hour` updates after every hour once
  // the buffer holds `warmup_transitions`.
  std::size_t train_epochs = 2;
  std::size_t train_steps_per_hour = 16;
  std::size_t warmup_transitions = 2048;
  // Training populations use seeds train_seed_offset + seed + epoch so they
  // never coincide with evaluation seeds seed .. seed + trials - 1.
  std::uint64_t train_seed_offset = 1000000;

  /// Cross-field checks; throws sim::ConfigError.
  void validate() const;
};

/// Parses a flat JSON object. Keys not listed in the README, wrong types and
/// invalid values raise sim::ConfigError.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Flat JSON with every key, in the same format parse_experiment_config reads.
std::string dump_experiment_config(const ExperimentConfig& config);

}  // namespace rpaf::harness
