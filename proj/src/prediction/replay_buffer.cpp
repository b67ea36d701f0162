#include "rpaf/prediction/replay_buffer.hpp"

#include <stdexcept>
#include <utility>

namespace rpaf::prediction {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer capacity must be positive");
  ring_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

bool ReplayBuffer::push(Transition t) {
  if (t.action != 0 && t.action != 1) throw std::invalid_argument("transition action must be 0 or 1");
  if (!(t.reward >= 0.0)) throw std::invalid_argument("transition reward must be non-negative");
  if (!t.active) return false;
  std::lock_guard lock(mutex_);
  period_counts_[t.period] += 1;
  if (ring_.size() < capacity_) {
    ring_.push_back(std::move(t));
  } else {
    ring_[next_] = std::move(t);
    next_ = (next_ + 1) % capacity_;
  }
  return true;
}

std::vector<SampledTransition> ReplayBuffer::sample(std::size_t batch, std::mt19937_64& rng) const {
  std::lock_guard lock(mutex_);
  if (ring_.empty()) throw std::logic_error("cannot sample an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, ring_.size() - 1);
  std::vector<SampledTransition> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    const auto& t = ring_[pick(rng)];
    out.push_back(SampledTransition{t, period_counts_.at(t.period)});
  }
  return out;
}

std::size_t ReplayBuffer::size() const {
  std::lock_guard lock(mutex_);
  return ring_.size();
}

std::size_t ReplayBuffer::active_count(std::uint64_t period) const {
  std::lock_guard lock(mutex_);
  auto it = period_counts_.find(period);
  return it == period_counts_.end() ? 0 : it->second;
}

}  // namespace rpaf::prediction
