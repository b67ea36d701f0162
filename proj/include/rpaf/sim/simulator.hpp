#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "rpaf/sim/sim_config.hpp"

namespace rpaf::sim {

struct Item {
  std::uint64_t id = 0;
  double score = 0.0;
};

using Slate = std::vector<Item>;

/// Leftover items of the user's last real-time recommendation, best first.
struct ResultCache {
  std::vector<Item> items;

  std::size_t size() const { return items.size(); }
};

struct UserSessionState {
  std::size_t user_id = 0;
  std::vector<double> preference;  // unit norm
  std::size_t consecutive_cached = 0;
  std::size_t cache_occupancy = 0;
  int hour_of_day = 0;
  bool session_active = false;
};

struct FeedbackOutcome {
  double watch_time = 0.0;  // seconds
  bool continued = false;
};

enum class ServeMode : std::uint8_t { kCached = 0, kRealTime = 1, kFailure = 2 };

struct Request {
  std::size_t user_id = 0;
  std::size_t hour = 0;
  std::size_t arrival = 0;         // order within the hour
  std::uint64_t global_index = 0;  // order within the whole run
};

/// Global item distribution: items scatter around one popular direction, so
/// users aligned with it watch more.
struct Catalog {
  std::vector<double> popular_direction;

  static Catalog from_config(const SimConfig& config);
};

enum class StreamTag : std::uint64_t {
  kUsers = 1,
  kCatalog = 2,
  kTraffic = 3,
  kGeneration = 4,
  kFeedback = 5,
  kPolicy = 6,  // stochastic allocation decisions
};

/// Independent generator for (seed, tag, index). Streams never overlap, so a
/// policy change never perturbs the randomness of unrelated requests.
std::mt19937_64 derive_stream(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0);

/// Requests of `hour` in arrival order; depends only on (config.seed, hour).
std::vector<Request> generate_traffic(const SimConfig& config, std::size_t hour,
                                      std::uint64_t first_global_index = 0);

/// L scored candidates sorted best first.
Slate generate_candidates(const SimConfig& config, const Catalog& catalog,
                          std::span<const double> preference, std::uint64_t item_id_base,
                          std::mt19937_64& rng);

/// Shows the top K of `candidates` and replaces the cache with the rest.
Slate serve_realtime(UserSessionState& user, ResultCache& cache, Slate candidates,
                     const SimConfig& config);

/// Shows the first K cached items; nullopt when fewer than K are cached.
std::optional<Slate> serve_cached(UserSessionState& user, ResultCache& cache,
                                  const SimConfig& config);

double staleness_discount(const SimConfig& config, std::size_t consecutive_cached);
double item_watch_seconds(const SimConfig& config, double score);
double slate_watch_seconds(const SimConfig& config, const Slate& slate);

/// Watch time of `slate` for `user` (whose consecutive_cached already counts
/// this serve) and whether the user sends another request.
FeedbackOutcome feedback(const UserSessionState& user, const Slate& slate, bool was_cached,
                         const SimConfig& config, std::mt19937_64& rng);

/// Applies the forced-action rules: an empty cache forces real time, an
/// exhausted budget forces the cache, and when both bind the serve fails.
ServeMode resolve_action(int requested, const ResultCache& cache, std::size_t budget_remaining,
                         const SimConfig& config);

struct StepResult {
  ServeMode mode = ServeMode::kFailure;
  Slate slate;
  FeedbackOutcome outcome;
  UserSessionState before;
  UserSessionState after;
  bool done = true;
};

/// One request: serve in `mode`, collect feedback, update the user. A
/// failed serve yields zero watch time and ends the session.
/// Throws std::logic_error if the user has no active session.
StepResult step(UserSessionState& user, ResultCache& cache, ServeMode mode,
                const SimConfig& config, const Catalog& catalog, std::uint64_t item_id_base,
                std::mt19937_64& generation_rng, std::mt19937_64& feedback_rng);

/// Owns the users and their caches for one seeded run.
class Simulator {
 public:
  explicit Simulator(SimConfig config);

  const SimConfig& config() const { return config_; }
  const Catalog& catalog() const { return catalog_; }

  /// Traffic of `hour`, numbered after every request issued so far.
  std::vector<Request> begin_hour(std::size_t hour);

  /// Marks the request's user as present: sets the hour and opens a session.
  const UserSessionState& arrive(const Request& request);

  const UserSessionState& user(std::size_t user_id) const { return users_.at(user_id); }
  const ResultCache& cache(std::size_t user_id) const { return caches_.at(user_id); }

  /// Candidates a real-time serve of `request` would produce, without serving.
  Slate preview_candidates(const Request& request) const;

  /// Serves `request` in an already resolved mode and updates the user.
  StepResult step(const Request& request, ServeMode mode);

 private:
  SimConfig config_;
  Catalog catalog_;
  std::vector<UserSessionState> users_;
  std::vector<ResultCache> caches_;
  std::uint64_t next_global_index_ = 0;
};

}  // namespace rpaf::sim
