#include "rpaf/prediction/losses.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace rpaf::prediction {

ActorLossTerms actor_loss(const nn::DenseNet& actor, const nn::DenseNet& critic,
                          std::span<const double> state, double m_t, const Penalty& penalty,
                          std::span<double> actor_grad, double scale) {
  ActorLossTerms out;
  const auto cache = actor.forward(state);
  out.a_tilde = cache.output()[0];
  out.q = critic_heads(critic, state);

  // A saturated logistic can round to exactly 0 or 1; keep the KL term finite.
  double x_hat = out.a_tilde;
  if (penalty.kind == PenaltyKind::kKl) {
    x_hat = std::clamp(x_hat, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
  }
  const auto t = prediction::penalty(penalty, x_hat, m_t);
  out.penalty = t.value;
  out.loss = -critic_value(out.q, out.a_tilde) + t.value;

  const std::array<double, 1> d_out{scale * (-(out.q.q1 - out.q.q0) + t.derivative)};
  actor.backward(cache, d_out, actor_grad);
  return out;
}

double td_target(double reward, bool done, double gamma, double q_next) {
  return reward + (done ? 0.0 : gamma * q_next);
}

CriticLossTerms critic_loss(const nn::DenseNet& critic, std::span<const double> state, int action,
                            double target, std::span<double> critic_grad, double scale) {
  if (action != 0 && action != 1) throw std::invalid_argument("critic_loss: action must be 0 or 1");
  const auto cache = critic.forward(state);
  CriticLossTerms out;
  out.q = cache.output()[static_cast<std::size_t>(action)];
  out.td_error = out.q - target;
  out.loss = out.td_error * out.td_error;
  std::array<double, 2> d_out{0.0, 0.0};
  d_out[static_cast<std::size_t>(action)] = scale * 2.0 * out.td_error;
  critic.backward(cache, d_out, critic_grad);
  return out;
}

CriticLossTerms critic_loss(const nn::DenseNet& critic, const nn::DenseNet& actor_target,
                            const nn::DenseNet& critic_target, const Transition& t, double gamma,
                            std::span<double> critic_grad, double reward_scale) {
  if (!t.active) throw std::invalid_argument("critic_loss: inactive transition");
  double q_next = 0.0;
  if (!t.done) {
    const double a_next = actor_output(actor_target, t.next_state);
    q_next = critic_value(critic_target, t.next_state, a_next);
  }
  const double y = td_target(reward_scale * t.reward, t.done, gamma, q_next);
  return critic_loss(critic, t.state, t.action, y, critic_grad);
}

}  // namespace rpaf::prediction
