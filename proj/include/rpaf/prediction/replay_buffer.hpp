#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <random>
#include <vector>

namespace rpaf::prediction {

struct Transition {
  std::vector<double> state;
  int action = 0;  // 1 = real time
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
  bool active = true;
  std::uint64_t period = 0;
};

struct SampledTransition {
  Transition transition;
  std::size_t period_active_count = 0;  // requests seen in the transition's period
};

/// Fixed-capacity ring of active transitions with a uniform sampler.
///
/// Every public member locks one mutex, so a simulator thread pushing and a
/// trainer thread sampling observe a single total order of operations.
class ReplayBuffer {
 public:
  /// Throws std::invalid_argument for zero capacity.
  explicit ReplayBuffer(std::size_t capacity);

  /// Stores an active transition (evicting the oldest when full) and counts
  /// it toward its period. Inactive transitions are dropped; returns whether
  /// the transition was stored. Throws std::invalid_argument when the action
  /// is not binary or the reward is negative.
  bool push(Transition t);

  /// `batch` draws with replacement, uniform over stored transitions.
  /// Throws std::logic_error when the buffer is empty.
  std::vector<SampledTransition> sample(std::size_t batch, std::mt19937_64& rng) const;

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }
  std::size_t active_count(std::uint64_t period) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> ring_;
  std::size_t next_ = 0;
  std::map<std::uint64_t, std::size_t> period_counts_;
  mutable std::mutex mutex_;
};

}  // namespace rpaf::prediction
