#include "rpaf/prediction/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rpaf/parallel/batch_reduce.hpp"
#include "rpaf/prediction/losses.hpp"

namespace rpaf::prediction {
namespace {

template <class Fn>
double reduce(const TrainerConfig& config, std::size_t n, std::span<double> out, Fn&& fn) {
  if (config.parallel) {
    return parallel::reduce_gradients_parallel(n, out, fn, config.reduction_chunks);
  }
  return parallel::reduce_gradients_serial(n, out, fn);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

Backbone parse_backbone(std::string_view name) {
  if (name == "ddpg") return Backbone::kDdpg;
  if (name == "td3") return Backbone::kTd3;
  throw std::invalid_argument("unknown backbone '" + std::string(name) + "'");
}

std::string to_string(Backbone backbone) { return backbone == Backbone::kDdpg ? "ddpg" : "td3"; }

void TrainerConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(actor_lr > 0.0 && std::isfinite(actor_lr), "actor_lr must be positive");
  require(critic_lr > 0.0 && std::isfinite(critic_lr), "critic_lr must be positive");
  require(gamma >= 0.0 && gamma < 1.0, "gamma must be in [0, 1)");
  require(tau > 0.0 && tau <= 1.0, "tau must be in (0, 1]");
  require(batch_size > 0, "batch_size must be positive");
  require(buffer_size > 0, "buffer_size must be positive");
  require(shape.hidden_width > 0, "hidden_width must be positive");
  require(penalty.weight >= 0.0 && std::isfinite(penalty.weight), "alpha must be finite and >= 0");
  require(reward_scale > 0.0 && std::isfinite(reward_scale), "reward_scale must be positive");
  require(policy_delay > 0, "policy_delay must be positive");
  require(target_noise >= 0.0 && target_noise_clip >= 0.0, "target noise must be non-negative");
  require(budget > 0, "budget must be positive");
  require(reduction_chunks > 0, "reduction_chunks must be positive");
}

Trainer::Trainer(std::size_t state_dim, TrainerConfig config)
    : config_(std::move(config)), state_dim_(state_dim), rng_(config_.seed) {
  config_.validate();
  actor_ = NetPair(make_actor(state_dim, config_.shape), rng_);
  const std::size_t n_critics = config_.backbone == Backbone::kTd3 ? 2 : 1;
  for (std::size_t i = 0; i < n_critics; ++i) {
    critics_.emplace_back(make_critic(state_dim, config_.shape), rng_);
  }
  actor_opt_ = nn::AdamState(actor_.online.parameter_count(), {.learning_rate = config_.actor_lr});
  for (const auto& c : critics_) {
    critic_opts_.emplace_back(c.online.parameter_count(),
                              nn::AdamConfig{.learning_rate = config_.critic_lr});
  }
}

double Trainer::act(std::span<const double> state) const {
  return actor_output(actor_.online, state);
}

TrainDiagnostics Trainer::train_step(const ReplayBuffer& buffer) {
  const auto batch = buffer.sample(config_.batch_size, rng_);
  return update(batch, config_.backbone == Backbone::kTd3);
}

TrainDiagnostics Trainer::update(const std::vector<SampledTransition>& batch, bool twin) {
  step_ += 1;
  const std::size_t n = batch.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  // Target-policy smoothing noise is drawn serially up front so the random
  // stream does not depend on how samples are spread over threads.
  std::vector<double> noise(n, 0.0);
  if (twin && config_.target_noise > 0.0) {
    std::normal_distribution<double> normal(0.0, config_.target_noise);
    for (auto& e : noise) {
      e = std::clamp(normal(rng_), -config_.target_noise_clip, config_.target_noise_clip);
    }
  }

  std::vector<double> targets(n, 0.0);
  std::vector<double> m_t(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    m_t[i] = compute_m_t(config_.budget, batch[i].period_active_count).value_or(1.0);
  }
  parallel::parallel_for(n, [&](std::size_t i) {
    const auto& t = batch[i].transition;
    double q_next = 0.0;
    if (!t.done) {
      const double a_next =
          std::clamp(actor_output(actor_.target, t.next_state) + noise[i], 0.0, 1.0);
      q_next = critic_value(critic_heads(critics_[0].target, t.next_state), a_next);
      if (twin) {
        q_next = std::min(q_next, critic_value(critic_heads(critics_[1].target, t.next_state), a_next));
      }
    }
    targets[i] = td_target(config_.reward_scale * t.reward, t.done, config_.gamma, q_next);
  });

  TrainDiagnostics diag;
  diag.step = step_;
  diag.mean_m_t = mean(m_t);

  std::vector<double> td_abs(n, 0.0);
  for (std::size_t c = 0; c < critics_.size(); ++c) {
    auto& critic = critics_[c];
    std::vector<double> grad(critic.online.parameter_count(), 0.0);
    const double loss = reduce(config_, n, grad, [&](std::size_t i, std::span<double> g) {
      const auto& t = batch[i].transition;
      if (!t.active) return 0.0;
      const auto terms = critic_loss(critic.online, t.state, t.action, targets[i], g, inv_n);
      if (c == 0) td_abs[i] = std::abs(terms.td_error);
      return terms.loss * inv_n;
    });
    nn::adam_step(critic.online.parameters(), grad, critic_opts_[c]);
    if (c == 0) diag.critic_loss = loss;
  }
  diag.mean_td_error = mean(td_abs);

  const bool update_actor = !twin || step_ % config_.policy_delay == 0;
  std::vector<double> a_tilde(n, 0.0);
  std::vector<double> pen(n, 0.0);
  if (update_actor) {
    std::vector<double> grad(actor_.online.parameter_count(), 0.0);
    diag.actor_loss = reduce(config_, n, grad, [&](std::size_t i, std::span<double> g) {
      const auto& t = batch[i].transition;
      if (!t.active) return 0.0;
      const auto terms = actor_loss(actor_.online, critics_[0].online, t.state, m_t[i],
                                    config_.penalty, g, inv_n);
      a_tilde[i] = terms.a_tilde;
      pen[i] = terms.penalty;
      return terms.loss * inv_n;
    });
    nn::adam_step(actor_.online.parameters(), grad, actor_opt_);
    nn::soft_update(actor_.target, actor_.online, config_.tau);
    for (auto& critic : critics_) nn::soft_update(critic.target, critic.online, config_.tau);
  } else {
    parallel::parallel_for(n, [&](std::size_t i) {
      a_tilde[i] = actor_output(actor_.online, batch[i].transition.state);
      pen[i] = penalty(config_.penalty, std::clamp(a_tilde[i], 1e-300, 1.0 - 1e-16), m_t[i]).value;
    });
  }
  diag.actor_updated = update_actor;
  diag.mean_a_tilde = mean(a_tilde);
  diag.mean_penalty = mean(pen);
  return diag;
}

std::vector<nn::DenseNet> Trainer::export_networks() const {
  std::vector<nn::DenseNet> nets{actor_.online, actor_.target};
  for (const auto& c : critics_) {
    nets.push_back(c.online);
    nets.push_back(c.target);
  }
  return nets;
}

void Trainer::import_networks(const std::vector<nn::DenseNet>& nets) {
  if (nets.size() != 2 + 2 * critics_.size()) {
    throw std::invalid_argument("checkpoint holds " + std::to_string(nets.size()) +
                                " networks, expected " + std::to_string(2 + 2 * critics_.size()));
  }
  auto check = [](const nn::DenseNet& have, const nn::DenseNet& got) {
    if (!have.same_shape(got)) throw std::invalid_argument("checkpoint network shape mismatch");
  };
  check(actor_.online, nets[0]);
  check(actor_.target, nets[1]);
  for (std::size_t c = 0; c < critics_.size(); ++c) {
    check(critics_[c].online, nets[2 + 2 * c]);
    check(critics_[c].target, nets[3 + 2 * c]);
  }
  actor_.online = nets[0];
  actor_.target = nets[1];
  for (std::size_t c = 0; c < critics_.size(); ++c) {
    critics_[c].online = nets[2 + 2 * c];
    critics_[c].target = nets[3 + 2 * c];
  }
}

}  // namespace rpaf::prediction
