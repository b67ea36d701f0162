#include "rpaf/harness/episode.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

#include "rpaf/allocation/allocators.hpp"
#include "rpaf/allocation/budget_ledger.hpp"
#include "rpaf/allocation/rank_index.hpp"
#include "rpaf/prediction/networks.hpp"
#include "rpaf/prediction/penalty.hpp"
#include "rpaf/prediction/state_encoding.hpp"
#include "rpaf/sim/simulator.hpp"

namespace rpaf::harness {
namespace {

using sim::ServeMode;

// Serves the request in real time if the quota allows, otherwise falls back
// through the forced-action rules.
ServeMode serve_requested(int requested, const sim::ResultCache& cache,
                          allocation::BudgetLedger& ledger, const sim::SimConfig& config) {
  const auto mode = sim::resolve_action(requested, cache, ledger.remaining(), config);
  if (mode == ServeMode::kRealTime && !ledger.try_consume()) {
    // Only reachable with concurrent consumers; fall back like an exhausted budget.
    return sim::resolve_action(requested, cache, 0, config);
  }
  return mode;
}

// Immediate watch-time gain of a real-time serve over a cached one, with the
// user state frozen at the start of the hour.
std::vector<double> myopic_gains(const sim::Simulator& simulator,
                                 const std::vector<sim::Request>& requests) {
  const auto& config = simulator.config();
  std::vector<double> gains(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& cache = simulator.cache(requests[i].user_id);
    if (cache.size() < config.slate_size) {
      gains[i] = std::numeric_limits<double>::infinity();
      continue;
    }
    const auto fresh = simulator.preview_candidates(requests[i]);
    double fresh_watch = 0.0;
    for (std::size_t k = 0; k < config.slate_size; ++k) {
      fresh_watch += sim::item_watch_seconds(config, fresh[k].score);
    }
    double cached_watch = 0.0;
    for (std::size_t k = 0; k < config.slate_size; ++k) {
      cached_watch += sim::item_watch_seconds(config, cache.items[k].score);
    }
    const auto& user = simulator.user(requests[i].user_id);
    cached_watch *= sim::staleness_discount(config, user.consecutive_cached + 1);
    gains[i] = fresh_watch - cached_watch;
  }
  return gains;
}

}  // namespace

Method parse_method(std::string_view name) {
  if (name == "greedy") return Method::kGreedy;
  if (name == "all-realtime") return Method::kAllRealtime;
  if (name == "oracle-myopic") return Method::kOracleMyopic;
  if (name == "rpaf-nopool") return Method::kRpafNoPool;
  if (name == "rpaf") return Method::kRpaf;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::kGreedy:
      return "greedy";
    case Method::kAllRealtime:
      return "all-realtime";
    case Method::kOracleMyopic:
      return "oracle-myopic";
    case Method::kRpafNoPool:
      return "rpaf-nopool";
    case Method::kRpaf:
      break;
  }
  return "rpaf";
}

bool uses_actor(Method method) { return method == Method::kRpaf || method == Method::kRpafNoPool; }
bool uses_ledger(Method method) { return method != Method::kAllRealtime; }

EpisodeResult run_episode(const sim::SimConfig& config, const EpisodeOptions& options) {
  if (uses_actor(options.method) && options.actor == nullptr) {
    throw std::invalid_argument("method " + to_string(options.method) + " needs an actor");
  }
  sim::Simulator simulator(config);
  allocation::BudgetLedger ledger(config.hourly_budget);
  std::optional<allocation::RankIndex> index;
  if (options.method == Method::kRpaf) index.emplace(options.resolution);

  EpisodeResult result;
  result.hours.reserve(config.hours);
  for (std::size_t hour = 0; hour < config.hours; ++hour) {
    const auto requests = simulator.begin_hour(hour);
    ledger.reset(hour);
    if (index) index->rotate_period();

    std::vector<int> planned;
    if (options.method == Method::kOracleMyopic) {
      const auto gains = myopic_gains(simulator, requests);
      planned = allocation::batch_oracle(gains, std::min(config.hourly_budget, requests.size()));
    }

    const double m_t =
        prediction::compute_m_t(config.hourly_budget, requests.size()).value_or(1.0);

    HourlyMetrics m;
    m.hour = hour;
    m.requests = requests.size();
    m.budget = config.hourly_budget;
    double atilde_sum = 0.0;

    for (std::size_t i = 0; i < requests.size(); ++i) {
      const auto& request = requests[i];
      const auto& user = simulator.arrive(request);
      const auto& cache = simulator.cache(request.user_id);

      std::vector<double> state;
      double a_tilde = std::numeric_limits<double>::quiet_NaN();
      if (options.actor != nullptr) {
        state = prediction::encode_state(user, config);
        a_tilde = prediction::actor_output(*options.actor, state);
        atilde_sum += a_tilde;
      }

      ServeMode mode = ServeMode::kFailure;
      switch (options.method) {
        case Method::kAllRealtime:
          mode = ServeMode::kRealTime;
          break;
        case Method::kGreedy:
          mode = allocation::greedy_allocator(ledger) == 1
                     ? ServeMode::kRealTime
                     : serve_requested(0, cache, ledger, config);
          break;
        case Method::kOracleMyopic:
          mode = serve_requested(planned[i], cache, ledger, config);
          break;
        case Method::kRpafNoPool: {
          // Outside exploration, m_t = 1 means the quota covers the whole hour.
          int requested = 1;
          if (options.explore || m_t < 1.0) {
            auto rng = sim::derive_stream(config.seed, sim::StreamTag::kPolicy, request.global_index);
            requested = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < a_tilde;
          }
          mode = serve_requested(requested, cache, ledger, config);
          break;
        }
        case Method::kRpaf: {
          const auto decision = allocation::decide(*index, ledger, a_tilde);
          mode = decision.action == 1 ? ServeMode::kRealTime : serve_requested(0, cache, ledger, config);
          break;
        }
      }

      const auto step = simulator.step(request, mode);
      switch (step.mode) {
        case ServeMode::kRealTime:
          m.realtime += 1;
          break;
        case ServeMode::kCached:
          m.cached += 1;
          break;
        case ServeMode::kFailure:
          m.failures += 1;
          break;
      }
      m.watchtime += step.outcome.watch_time;

      if (options.on_transition) {
        if (state.empty()) state = prediction::encode_state(step.before, config);
        prediction::Transition t;
        t.state = std::move(state);
        t.action = step.mode == ServeMode::kRealTime ? 1 : 0;
        t.reward = step.outcome.watch_time;
        t.next_state = prediction::encode_state(step.after, config);
        t.done = step.done;
        t.active = true;
        t.period = options.period_offset + hour;
        options.on_transition(std::move(t));
      }
    }

    m.mean_atilde = options.actor != nullptr && m.requests > 0
                        ? atilde_sum / static_cast<double>(m.requests)
                        : std::numeric_limits<double>::quiet_NaN();
    result.total_watch_time += m.watchtime;
    result.hours.push_back(m);
    if (options.on_hour_end) options.on_hour_end(hour);
  }
  result.watch_time_per_user = result.total_watch_time / static_cast<double>(config.num_users);
  return result;
}

}  // namespace rpaf::harness
