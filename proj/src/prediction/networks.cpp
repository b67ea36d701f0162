#include "rpaf/prediction/networks.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace rpaf::prediction {
namespace {

std::vector<std::size_t> layer_dims(std::size_t input, const NetworkShape& shape,
                                    std::size_t output) {
  std::vector<std::size_t> dims{input};
  for (std::size_t i = 0; i < shape.hidden_layers; ++i) dims.push_back(shape.hidden_width);
  dims.push_back(output);
  return dims;
}

}  // namespace

nn::DenseNet make_critic(std::size_t state_dim, const NetworkShape& shape) {
  return nn::DenseNet(layer_dims(state_dim, shape, 2), nn::Activation::kRelu,
                      nn::Activation::kIdentity);
}

nn::DenseNet make_actor(std::size_t state_dim, const NetworkShape& shape) {
  return nn::DenseNet(layer_dims(state_dim, shape, 1), nn::Activation::kRelu,
                      nn::Activation::kLogistic);
}

QPair critic_heads(const nn::DenseNet& critic, std::span<const double> state) {
  const auto out = critic.predict(state);
  return QPair{out[0], out[1]};
}

double critic_value(const QPair& q, double a_tilde) {
  if (!(a_tilde >= 0.0 && a_tilde <= 1.0)) {
    throw std::domain_error("relaxed action must lie in [0, 1]");
  }
  return a_tilde * q.q1 + (1.0 - a_tilde) * q.q0;
}

double critic_value(const nn::DenseNet& critic, std::span<const double> state, double a_tilde) {
  return critic_value(critic_heads(critic, state), a_tilde);
}

double actor_output(const nn::DenseNet& actor, std::span<const double> state) {
  return actor.predict(state)[0];
}

NetPair::NetPair(nn::DenseNet net, std::mt19937_64& rng) : online(std::move(net)) {
  online.initialize(rng);
  target = online;
}

}  // namespace rpaf::prediction
