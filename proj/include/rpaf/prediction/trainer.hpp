#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpaf/nn/adam.hpp"
#include "rpaf/nn/dense_net.hpp"
#include "rpaf/prediction/networks.hpp"
#include "rpaf/prediction/penalty.hpp"
#include "rpaf/prediction/replay_buffer.hpp"

namespace rpaf::prediction {

enum class Backbone { kDdpg, kTd3 };

/// Accepts "ddpg" and "td3"; throws std::invalid_argument otherwise.
Backbone parse_backbone(std::string_view name);
std::string to_string(Backbone backbone);

struct TrainerConfig {
  Backbone backbone = Backbone::kTd3;
  Penalty penalty;
  double actor_lr = 1e-4;
  double critic_lr = 2e-4;
  double gamma = 0.9;
  double tau = 0.005;
  std::size_t batch_size = 256;
  std::size_t buffer_size = 100000;
  NetworkShape shape;
  // Rewards are multiplied by this before entering the critic target, which
  // keeps Q values near unit scale when rewards are measured in seconds.
  double reward_scale = 1.0;
  std::size_t policy_delay = 2;
  double target_noise = 0.1;
  double target_noise_clip = 0.2;
  std::size_t budget = 225;  // M, for m_t = M / active requests of the period
  std::uint64_t seed = 1;
  bool parallel = true;
  std::size_t reduction_chunks = 16;

  /// Throws std::invalid_argument on the first bad value.
  void validate() const;
};

struct TrainDiagnostics {
  std::uint64_t step = 0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double mean_a_tilde = 0.0;
  double mean_penalty = 0.0;
  double mean_td_error = 0.0;  // mean |Q(s, a) - y|
  double mean_m_t = 0.0;
  bool actor_updated = false;
};

/// Actor-critic learner with the relaxed local allocator objective.
///
/// DDPG keeps one critic; TD3 keeps two, takes the smaller target value,
/// smooths the target action with clipped noise and updates the actor (and
/// all targets) every `policy_delay` steps.
class Trainer {
 public:
  Trainer(std::size_t state_dim, TrainerConfig config);

  const TrainerConfig& config() const { return config_; }
  std::uint64_t steps() const { return step_; }

  /// One update of the configured backbone. The buffer must hold at least
  /// one transition; throws std::logic_error otherwise.
  TrainDiagnostics train_step(const ReplayBuffer& buffer);

  /// Relaxed action of the online actor.
  double act(std::span<const double> state) const;

  const NetPair& actor() const { return actor_; }
  const NetPair& critic(std::size_t i = 0) const { return critics_.at(i); }
  NetPair& mutable_actor() { return actor_; }
  NetPair& mutable_critic(std::size_t i = 0) { return critics_.at(i); }
  std::size_t critic_count() const { return critics_.size(); }

  /// actor, actor target, then each critic followed by its target.
  std::vector<nn::DenseNet> export_networks() const;
  /// Inverse of export_networks; throws std::invalid_argument when the count
  /// or shapes do not fit this trainer.
  void import_networks(const std::vector<nn::DenseNet>& nets);

 private:
  TrainDiagnostics update(const std::vector<SampledTransition>& batch, bool twin);

  TrainerConfig config_;
  std::size_t state_dim_;
  std::mt19937_64 rng_;
  NetPair actor_;
  std::vector<NetPair> critics_;
  nn::AdamState actor_opt_;
  std::vector<nn::AdamState> critic_opts_;
  std::uint64_t step_ = 0;
};

}  // namespace rpaf::prediction
