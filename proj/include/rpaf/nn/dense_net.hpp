#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace rpaf::nn {

enum class Activation : std::uint8_t { kIdentity = 0, kRelu = 1, kLogistic = 2 };

struct LayerShape {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  Activation activation = Activation::kIdentity;
  std::size_t weight_offset = 0;  // row-major outputs x inputs
  std::size_t bias_offset = 0;

  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

/// Per-layer values kept by forward() for the matching backward() call.
struct ForwardCache {
  // values[0] is the input, values[i + 1] the post-activation output of layer i.
  std::vector<std::vector<double>> values;

  std::span<const double> output() const { return values.back(); }
};

/// Fully connected feed-forward network over one flat parameter vector.
///
/// Every layer is `y = act(W x + b)`; all parameters live in a single
/// contiguous buffer so optimizers, target copies and checkpoints treat the
/// network as one vector.
class DenseNet {
 public:
  DenseNet() = default;

  /// `dims` = {input, hidden..., output}; hidden layers use `hidden`, the last
  /// layer uses `output`. Parameters start at zero.
  DenseNet(std::vector<std::size_t> dims, Activation hidden, Activation output);

  /// Builds a network with explicit per-layer activations.
  DenseNet(std::vector<std::size_t> dims, std::vector<Activation> activations);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  void initialize(std::mt19937_64& rng);

  std::size_t input_dim() const { return dims_.front(); }
  std::size_t output_dim() const { return dims_.back(); }
  std::size_t layer_count() const { return layers_.size(); }
  std::size_t parameter_count() const { return params_.size(); }

  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<LayerShape>& layers() const { return layers_; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  /// Throws std::invalid_argument if input.size() != input_dim().
  ForwardCache forward(std::span<const double> input) const;

  /// Output only; avoids keeping intermediate values.
  std::vector<double> predict(std::span<const double> input) const;

  /// Adds dL/dparams into `param_grad` and, when non-empty, writes dL/dinput
  /// into `input_grad`. `cache` must come from forward() on this network.
  void backward(const ForwardCache& cache, std::span<const double> output_grad,
                std::span<double> param_grad, std::span<double> input_grad = {}) const;

  bool same_shape(const DenseNet& other) const;
  bool all_finite() const;

  friend bool operator==(const DenseNet&, const DenseNet&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<LayerShape> layers_;
  std::vector<double> params_;
};

/// Fresh-gradient convenience wrapper around DenseNet::backward.
struct Gradients {
  std::vector<double> params;
  std::vector<double> input;
};

Gradients backward(const DenseNet& net, const ForwardCache& cache,
                   std::span<const double> output_grad);

/// target <- (1 - tau) * target + tau * online. Throws std::invalid_argument
/// on a shape mismatch or tau outside (0, 1].
void soft_update(DenseNet& target, const DenseNet& online, double tau);

}  // namespace rpaf::nn
