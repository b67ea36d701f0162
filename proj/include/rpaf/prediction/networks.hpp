#pragma once

#include <cstddef>
#include <random>
#include <span>

#include "rpaf/nn/dense_net.hpp"

namespace rpaf::prediction {

struct NetworkShape {
  std::size_t hidden_width = 64;
  std::size_t hidden_layers = 4;  // plus the output layer: five dense layers
};

/// state -> (Q(s, 0), Q(s, 1)); rectifier hidden layers, identity heads.
nn::DenseNet make_critic(std::size_t state_dim, const NetworkShape& shape);

/// state -> relaxed action in (0, 1); rectifier hidden layers, logistic head.
nn::DenseNet make_actor(std::size_t state_dim, const NetworkShape& shape);

struct QPair {
  double q0 = 0.0;  // cached
  double q1 = 0.0;  // real time
};

QPair critic_heads(const nn::DenseNet& critic, std::span<const double> state);

/// a * Q(s, 1) + (1 - a) * Q(s, 0). Throws std::domain_error unless 0 <= a <= 1.
double critic_value(const QPair& q, double a_tilde);
double critic_value(const nn::DenseNet& critic, std::span<const double> state, double a_tilde);

double actor_output(const nn::DenseNet& actor, std::span<const double> state);

/// Online network with its slowly tracking target copy.
struct NetPair {
  nn::DenseNet online;
  nn::DenseNet target;

  NetPair() = default;
  /// Initializes `online` from rng and copies it into `target`.
  NetPair(nn::DenseNet net, std::mt19937_64& rng);
};

}  // namespace rpaf::prediction
