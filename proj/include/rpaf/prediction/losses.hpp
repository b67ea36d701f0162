#pragma once

#include <span>

#include "rpaf/nn/dense_net.hpp"
#include "rpaf/prediction/networks.hpp"
#include "rpaf/prediction/penalty.hpp"
#include "rpaf/prediction/replay_buffer.hpp"

namespace rpaf::prediction {

struct ActorLossTerms {
  double loss = 0.0;
  double a_tilde = 0.0;
  QPair q;
  double penalty = 0.0;  // alpha * T(a_tilde, m_t)
};

/// -Q(s, a~) + alpha * T(a~, m_t) with a~ = actor(s).
///
/// Adds `scale` * d loss / d theta into `actor_grad` (sized like the actor's
/// parameters). The critic is held fixed: its heads enter only through
/// d Q / d a~ = Q(s, 1) - Q(s, 0).
ActorLossTerms actor_loss(const nn::DenseNet& actor, const nn::DenseNet& critic,
                          std::span<const double> state, double m_t, const Penalty& penalty,
                          std::span<double> actor_grad, double scale = 1.0);

/// r + gamma * (1 - done) * q_next.
double td_target(double reward, bool done, double gamma, double q_next);

struct CriticLossTerms {
  double loss = 0.0;
  double q = 0.0;          // head selected by the logged action
  double td_error = 0.0;   // q - target
};

/// (Q(s, a) - target)^2 where Q(s, a) is the head of the logged action.
/// Adds `scale` * d loss / d phi into `critic_grad`; the target is a constant.
CriticLossTerms critic_loss(const nn::DenseNet& critic, std::span<const double> state, int action,
                            double target, std::span<double> critic_grad, double scale = 1.0);

/// Full single-sample critic loss: the target is built from the target actor
/// and target critic at the next state, with the reward multiplied by
/// `reward_scale`. Throws std::invalid_argument for an inactive transition.
CriticLossTerms critic_loss(const nn::DenseNet& critic, const nn::DenseNet& actor_target,
                            const nn::DenseNet& critic_target, const Transition& t, double gamma,
                            std::span<double> critic_grad, double reward_scale = 1.0);

}  // namespace rpaf::prediction
