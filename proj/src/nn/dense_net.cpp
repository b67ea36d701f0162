#include "rpaf/nn/dense_net.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace rpaf::nn {
namespace {

double activate(Activation a, double z) {
  switch (a) {
    case Activation::kRelu:
      return z > 0.0 ? z : 0.0;
    case Activation::kLogistic:
      return 1.0 / (1.0 + std::exp(-z));
    case Activation::kIdentity:
      break;
  }
  return z;
}

// Derivative expressed through the post-activation value y.
double activation_slope(Activation a, double y) {
  switch (a) {
    case Activation::kRelu:
      return y > 0.0 ? 1.0 : 0.0;
    case Activation::kLogistic:
      return y * (1.0 - y);
    case Activation::kIdentity:
      break;
  }
  return 1.0;
}

}  // namespace

DenseNet::DenseNet(std::vector<std::size_t> dims, Activation hidden, Activation output)
    : DenseNet(dims, [&] {
        std::vector<Activation> acts(dims.size() < 2 ? 0 : dims.size() - 1, hidden);
        if (!acts.empty()) acts.back() = output;
        return acts;
      }()) {}

DenseNet::DenseNet(std::vector<std::size_t> dims, std::vector<Activation> activations)
    : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw std::invalid_argument("DenseNet needs at least one layer");
  if (activations.size() != dims_.size() - 1) {
    throw std::invalid_argument("DenseNet: one activation per layer required");
  }
  std::size_t offset = 0;
  for (std::size_t i = 0; i + 1 < dims_.size(); ++i) {
    if (dims_[i] == 0 || dims_[i + 1] == 0) {
      throw std::invalid_argument("DenseNet: layer dimensions must be positive");
    }
    LayerShape layer;
    layer.inputs = dims_[i];
    layer.outputs = dims_[i + 1];
    layer.activation = activations[i];
    layer.weight_offset = offset;
    offset += layer.inputs * layer.outputs;
    layer.bias_offset = offset;
    offset += layer.outputs;
    layers_.push_back(layer);
  }
  params_.assign(offset, 0.0);
}

void DenseNet::initialize(std::mt19937_64& rng) {
  for (const auto& layer : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.inputs));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::size_t k = 0; k < layer.inputs * layer.outputs; ++k) {
      params_[layer.weight_offset + k] = dist(rng);
    }
    for (std::size_t k = 0; k < layer.outputs; ++k) params_[layer.bias_offset + k] = 0.0;
  }
}

ForwardCache DenseNet::forward(std::span<const double> input) const {
  if (input.size() != input_dim()) {
    throw std::invalid_argument("DenseNet::forward: expected input of size " +
                                std::to_string(input_dim()) + ", got " +
                                std::to_string(input.size()));
  }
  ForwardCache cache;
  cache.values.reserve(layers_.size() + 1);
  cache.values.emplace_back(input.begin(), input.end());
  for (const auto& layer : layers_) {
    const auto& x = cache.values.back();
    std::vector<double> y(layer.outputs);
    const double* w = params_.data() + layer.weight_offset;
    const double* b = params_.data() + layer.bias_offset;
    for (std::size_t r = 0; r < layer.outputs; ++r) {
      const double* row = w + r * layer.inputs;
      double z = b[r];
      for (std::size_t c = 0; c < layer.inputs; ++c) z += row[c] * x[c];
      y[r] = activate(layer.activation, z);
    }
    cache.values.push_back(std::move(y));
  }
  return cache;
}

std::vector<double> DenseNet::predict(std::span<const double> input) const {
  auto cache = forward(input);
  return std::move(cache.values.back());
}

void DenseNet::backward(const ForwardCache& cache, std::span<const double> output_grad,
                        std::span<double> param_grad, std::span<double> input_grad) const {
  if (cache.values.size() != layers_.size() + 1 || output_grad.size() != output_dim() ||
      param_grad.size() != params_.size() ||
      (!input_grad.empty() && input_grad.size() != input_dim())) {
    throw std::invalid_argument("DenseNet::backward: shape mismatch");
  }
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  std::vector<double> next;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const auto& layer = layers_[li];
    const auto& x = cache.values[li];
    const auto& y = cache.values[li + 1];
    for (std::size_t r = 0; r < layer.outputs; ++r) delta[r] *= activation_slope(layer.activation, y[r]);

    const double* w = params_.data() + layer.weight_offset;
    double* gw = param_grad.data() + layer.weight_offset;
    double* gb = param_grad.data() + layer.bias_offset;
    for (std::size_t r = 0; r < layer.outputs; ++r) {
      const double d = delta[r];
      gb[r] += d;
      if (d == 0.0) continue;
      double* grow = gw + r * layer.inputs;
      for (std::size_t c = 0; c < layer.inputs; ++c) grow[c] += d * x[c];
    }

    if (li == 0 && input_grad.empty()) break;
    next.assign(layer.inputs, 0.0);
    for (std::size_t r = 0; r < layer.outputs; ++r) {
      const double d = delta[r];
      if (d == 0.0) continue;
      const double* row = w + r * layer.inputs;
      for (std::size_t c = 0; c < layer.inputs; ++c) next[c] += row[c] * d;
    }
    delta.swap(next);
  }
  if (!input_grad.empty()) {
    for (std::size_t c = 0; c < input_grad.size(); ++c) input_grad[c] = delta[c];
  }
}

bool DenseNet::same_shape(const DenseNet& other) const {
  if (dims_ != other.dims_ || layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].activation != other.layers_[i].activation) return false;
  }
  return true;
}

bool DenseNet::all_finite() const {
  for (double p : params_) {
    if (!std::isfinite(p)) return false;
  }
  return true;
}

Gradients backward(const DenseNet& net, const ForwardCache& cache,
                   std::span<const double> output_grad) {
  Gradients g;
  g.params.assign(net.parameter_count(), 0.0);
  g.input.assign(net.input_dim(), 0.0);
  net.backward(cache, output_grad, g.params, g.input);
  return g;
}

void soft_update(DenseNet& target, const DenseNet& online, double tau) {
  if (!target.same_shape(online)) throw std::invalid_argument("soft_update: shape mismatch");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("soft_update: tau must be in (0, 1]");
  auto t = target.parameters();
  const auto o = online.parameters();
  if (tau == 1.0) {
    std::copy(o.begin(), o.end(), t.begin());
    return;
  }
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = (1.0 - tau) * t[i] + tau * o[i];
}

}  // namespace rpaf::nn
