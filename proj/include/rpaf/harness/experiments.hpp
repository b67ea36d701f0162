#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rpaf/harness/episode.hpp"
#include "rpaf/harness/experiment_config.hpp"
#include "rpaf/harness/report.hpp"
#include "rpaf/nn/dense_net.hpp"
#include "rpaf/prediction/trainer.hpp"

namespace rpaf::harness {

/// Training progress averaged over one simulated hour.
struct TrainingRecord {
  std::size_t epoch = 0;
  std::size_t hour = 0;
  std::size_t requests = 0;
  std::size_t buffer_size = 0;
  std::size_t train_steps = 0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double mean_a_tilde = 0.0;  // over training batches
  double mean_penalty = 0.0;
  double mean_td_error = 0.0;
  double mean_m_t = 0.0;
  double behavior_a_tilde = 0.0;  // mean relaxed action while collecting
};

struct TrainingResult {
  std::vector<TrainingRecord> records;
  std::vector<nn::DenseNet> networks;  // Trainer::export_networks order
};

/// Alternates data collection with the Bernoulli(a~) behavior policy under
/// the hourly budget and actor-critic updates. When `out_dir` is non-empty,
/// writes training.csv and checkpoint.bin there. A non-empty `init` (in
/// Trainer::export_networks order) warm-starts every network.
TrainingResult run_collect_train(const ExperimentConfig& config,
                                 const std::filesystem::path& out_dir = {},
                                 const std::vector<nn::DenseNet>& init = {});

void write_training_csv(const std::filesystem::path& path, const std::vector<TrainingRecord>& rows);

struct EvaluationResult {
  MethodSummary summary;
  std::vector<std::vector<HourlyMetrics>> trials;
};

/// Runs config.trials episodes (seeds config.sim.seed + k) in parallel. The
/// actor may be null for methods that do not use one.
EvaluationResult run_evaluate(const ExperimentConfig& config, const nn::DenseNet* actor);

/// Loads the actor from a checkpoint. Throws std::invalid_argument when the
/// checkpoint does not match the configured state encoding.
EvaluationResult run_evaluate(const ExperimentConfig& config, const std::filesystem::path& checkpoint);

}  // namespace rpaf::harness
