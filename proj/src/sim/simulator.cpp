#include "rpaf/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace rpaf::sim {
namespace {

std::vector<double> random_unit_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  double norm_sq = 0.0;
  do {
    norm_sq = 0.0;
    for (auto& x : v) {
      x = normal(rng);
      norm_sq += x * x;
    }
  } while (norm_sq < 1e-12);
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (auto& x : v) x *= inv;
  return v;
}

double softplus(double x) {
  // log(1 + e^x) without overflow for large x.
  return x > 30.0 ? x : std::log1p(std::exp(x));
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

SimConfig validated(SimConfig config) {
  config.validate();
  return config;
}

}  // namespace

Catalog Catalog::from_config(const SimConfig& config) {
  auto rng = derive_stream(config.catalog_seed, StreamTag::kCatalog);
  return Catalog{random_unit_vector(config.preference_dim, rng)};
}

std::mt19937_64 derive_stream(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
  const auto t = static_cast<std::uint64_t>(tag);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::vector<Request> generate_traffic(const SimConfig& config, std::size_t hour,
                                      std::uint64_t first_global_index) {
  const std::size_t count = traffic_at(config, hour);
  auto rng = derive_stream(config.seed, StreamTag::kTraffic, hour);
  std::uniform_int_distribution<std::size_t> pick(0, config.num_users - 1);
  std::vector<Request> requests(count);
  for (std::size_t i = 0; i < count; ++i) {
    requests[i] = Request{pick(rng), hour, i, first_global_index + i};
  }
  return requests;
}

Slate generate_candidates(const SimConfig& config, const Catalog& catalog,
                          std::span<const double> preference, std::uint64_t item_id_base,
                          std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t dim = config.preference_dim;
  Slate candidates(config.realtime_return);
  std::vector<double> feature(dim);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double score = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      feature[j] = config.popularity_strength * catalog.popular_direction[j] +
                   config.item_noise * normal(rng);
      score += preference[j] * feature[j];
    }
    candidates[i] = Item{item_id_base + i, score};
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Item& a, const Item& b) { return a.score > b.score; });
  return candidates;
}

Slate serve_realtime(UserSessionState& user, ResultCache& cache, Slate candidates,
                     const SimConfig& config) {
  if (candidates.size() != config.realtime_return) {
    throw std::invalid_argument("serve_realtime: expected L candidates");
  }
  const auto split = candidates.begin() + static_cast<std::ptrdiff_t>(config.slate_size);
  cache.items.assign(split, candidates.end());
  candidates.erase(split, candidates.end());
  user.consecutive_cached = 0;
  user.cache_occupancy = cache.size();
  return candidates;
}

std::optional<Slate> serve_cached(UserSessionState& user, ResultCache& cache,
                                  const SimConfig& config) {
  if (cache.size() < config.slate_size) return std::nullopt;
  const auto split = cache.items.begin() + static_cast<std::ptrdiff_t>(config.slate_size);
  Slate slate(cache.items.begin(), split);
  cache.items.erase(cache.items.begin(), split);
  user.consecutive_cached += 1;
  user.cache_occupancy = cache.size();
  return slate;
}

double staleness_discount(const SimConfig& config, std::size_t consecutive_cached) {
  return std::max(config.staleness_floor,
                  1.0 - config.staleness_slope * static_cast<double>(consecutive_cached));
}

double item_watch_seconds(const SimConfig& config, double score) {
  return config.seconds_per_unit * softplus(score);
}

double slate_watch_seconds(const SimConfig& config, const Slate& slate) {
  double total = 0.0;
  for (const auto& item : slate) total += item_watch_seconds(config, item.score);
  return total;
}

FeedbackOutcome feedback(const UserSessionState& user, const Slate& slate, bool was_cached,
                         const SimConfig& config, std::mt19937_64& rng) {
  const double discount = was_cached ? staleness_discount(config, user.consecutive_cached) : 1.0;
  const double watch = slate_watch_seconds(config, slate) * discount;
  const double p_continue = logistic(config.leave_sensitivity * watch - config.leave_bias);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return FeedbackOutcome{watch, unit(rng) < p_continue};
}

ServeMode resolve_action(int requested, const ResultCache& cache, std::size_t budget_remaining,
                         const SimConfig& config) {
  const bool cache_ok = cache.size() >= config.slate_size;
  const bool budget_ok = budget_remaining > 0;
  if (requested != 0) {
    if (budget_ok) return ServeMode::kRealTime;
    return cache_ok ? ServeMode::kCached : ServeMode::kFailure;
  }
  if (cache_ok) return ServeMode::kCached;
  return budget_ok ? ServeMode::kRealTime : ServeMode::kFailure;
}

StepResult step(UserSessionState& user, ResultCache& cache, ServeMode mode,
                const SimConfig& config, const Catalog& catalog, std::uint64_t item_id_base,
                std::mt19937_64& generation_rng, std::mt19937_64& feedback_rng) {
  if (!user.session_active) throw std::logic_error("step: user has no active session");
  StepResult result;
  result.before = user;
  result.mode = mode;

  switch (mode) {
    case ServeMode::kRealTime: {
      auto candidates =
          generate_candidates(config, catalog, user.preference, item_id_base, generation_rng);
      result.slate = serve_realtime(user, cache, std::move(candidates), config);
      result.outcome = feedback(user, result.slate, false, config, feedback_rng);
      break;
    }
    case ServeMode::kCached: {
      auto slate = serve_cached(user, cache, config);
      if (!slate) throw std::logic_error("step: cached serve requested on an insufficient cache");
      result.slate = std::move(*slate);
      result.outcome = feedback(user, result.slate, true, config, feedback_rng);
      break;
    }
    case ServeMode::kFailure:
      result.outcome = FeedbackOutcome{0.0, false};
      break;
  }

  result.done = !result.outcome.continued;
  if (result.done) user.session_active = false;
  result.after = user;
  return result;
}

Simulator::Simulator(SimConfig config)
    : config_(validated(std::move(config))), catalog_(Catalog::from_config(config_)) {
  auto rng = derive_stream(config_.seed, StreamTag::kUsers);
  users_.resize(config_.num_users);
  caches_.resize(config_.num_users);
  for (std::size_t u = 0; u < users_.size(); ++u) {
    users_[u].user_id = u;
    users_[u].preference = random_unit_vector(config_.preference_dim, rng);
  }
}

std::vector<Request> Simulator::begin_hour(std::size_t hour) {
  auto requests = generate_traffic(config_, hour, next_global_index_);
  next_global_index_ += requests.size();
  return requests;
}

const UserSessionState& Simulator::arrive(const Request& request) {
  auto& user = users_.at(request.user_id);
  user.hour_of_day = static_cast<int>(request.hour % 24);
  user.session_active = true;
  return user;
}

Slate Simulator::preview_candidates(const Request& request) const {
  auto rng = derive_stream(config_.seed, StreamTag::kGeneration, request.global_index);
  return generate_candidates(config_, catalog_, users_.at(request.user_id).preference,
                             request.global_index * config_.realtime_return, rng);
}

StepResult Simulator::step(const Request& request, ServeMode mode) {
  auto generation = derive_stream(config_.seed, StreamTag::kGeneration, request.global_index);
  auto fb = derive_stream(config_.seed, StreamTag::kFeedback, request.global_index);
  return rpaf::sim::step(users_.at(request.user_id), caches_.at(request.user_id), mode, config_,
                         catalog_, request.global_index * config_.realtime_return, generation, fb);
}

}  // namespace rpaf::sim
