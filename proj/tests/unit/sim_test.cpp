#include <gtest/gtest.h>

#include <random>

#include "rpaf/sim/sim_config.hpp"
#include "rpaf/sim/simulator.hpp"

namespace rpaf::sim {
namespace {

Slate scored_slate(std::size_t n, double top = 1.0) {
  Slate s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(Item{i, top - 0.1 * static_cast<double>(i)});
  return s;
}

UserSessionState fresh_user(const SimConfig& config) {
  UserSessionState u;
  u.preference.assign(config.preference_dim, 0.0);
  u.preference[0] = 1.0;
  u.session_active = true;
  return u;
}

TEST(TrafficTest, ProfileEndpoints) {
  SimConfig c;
  EXPECT_EQ(traffic_at(c, 0), 50u);
  EXPECT_EQ(traffic_at(c, 12), 400u);
  EXPECT_EQ(traffic_at(c, 24), 50u);
  EXPECT_EQ(generate_traffic(c, 0).size(), 50u);
  EXPECT_EQ(generate_traffic(c, 12).size(), 400u);
}

TEST(TrafficTest, SameSeedSameUsers) {
  SimConfig c;
  const auto a = generate_traffic(c, 7);
  const auto b = generate_traffic(c, 7);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].user_id, b[i].user_id);
    EXPECT_EQ(a[i].arrival, i);
  }
  c.seed = 2;
  const auto other = generate_traffic(c, 7);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs |= a[i].user_id != other[i].user_id;
  EXPECT_TRUE(differs);
}

TEST(TrafficTest, StaysInsideBand) {
  SimConfig c;
  for (std::size_t h = 0; h < 48; ++h) {
    EXPECT_GE(traffic_at(c, h), c.traffic_min);
    EXPECT_LE(traffic_at(c, h), c.traffic_max);
  }
}

TEST(ServeTest, RealtimeSplitsReturnedItems) {
  SimConfig c;
  auto user = fresh_user(c);
  user.consecutive_cached = 5;
  ResultCache cache;
  const auto slate = serve_realtime(user, cache, scored_slate(40), c);
  EXPECT_EQ(slate.size(), 8u);
  EXPECT_EQ(cache.size(), 32u);
  EXPECT_EQ(user.consecutive_cached, 0u);
  EXPECT_EQ(user.cache_occupancy, 32u);
  EXPECT_EQ(slate.front().id, 0u);
  EXPECT_EQ(cache.items.front().id, 8u);
}

TEST(ServeTest, RealtimeSmallReturn) {
  SimConfig c;
  c.realtime_return = 10;
  auto user = fresh_user(c);
  ResultCache cache;
  const auto slate = serve_realtime(user, cache, scored_slate(10), c);
  EXPECT_EQ(slate.size(), 8u);
  EXPECT_EQ(cache.size(), 2u);
}

TEST(ServeTest, RealtimeReplacesCache) {
  SimConfig c;
  auto user = fresh_user(c);
  ResultCache cache{scored_slate(16, 9.0)};
  serve_realtime(user, cache, scored_slate(40), c);
  EXPECT_EQ(cache.size(), 32u);
  EXPECT_EQ(cache.items.front().id, 8u);
}

TEST(ServeTest, CachedConsumesK) {
  SimConfig c;
  auto user = fresh_user(c);
  ResultCache cache{scored_slate(32)};
  auto slate = serve_cached(user, cache, c);
  ASSERT_TRUE(slate.has_value());
  EXPECT_EQ(slate->size(), 8u);
  EXPECT_EQ(cache.size(), 24u);
  EXPECT_EQ(user.consecutive_cached, 1u);

  ResultCache exact{scored_slate(8)};
  EXPECT_TRUE(serve_cached(user, exact, c).has_value());
  EXPECT_EQ(exact.size(), 0u);

  ResultCache small{scored_slate(5)};
  EXPECT_FALSE(serve_cached(user, small, c).has_value());
  EXPECT_EQ(small.size(), 5u);
}

TEST(FeedbackTest, StalenessDiscount) {
  SimConfig c;
  EXPECT_DOUBLE_EQ(staleness_discount(c, 0), 1.0);
  EXPECT_DOUBLE_EQ(staleness_discount(c, 2), 0.8);
  EXPECT_DOUBLE_EQ(staleness_discount(c, 9), 0.6);
}

TEST(FeedbackTest, FreshServeIsUndiscounted) {
  SimConfig c;
  auto user = fresh_user(c);
  user.consecutive_cached = 3;
  const auto slate = scored_slate(8);
  std::mt19937_64 rng(1);
  const auto out = feedback(user, slate, false, c, rng);
  EXPECT_DOUBLE_EQ(out.watch_time, slate_watch_seconds(c, slate));
}

TEST(FeedbackTest, WatchTimeNonIncreasingInStaleness) {
  SimConfig c;
  auto user = fresh_user(c);
  const auto slate = scored_slate(8);
  double previous = INFINITY;
  for (std::size_t k = 1; k <= 12; ++k) {
    user.consecutive_cached = k;
    std::mt19937_64 rng(3);
    const double w = feedback(user, slate, true, c, rng).watch_time;
    EXPECT_LE(w, previous);
    EXPECT_GE(w, 0.0);
    previous = w;
  }
}

TEST(ResolveTest, ForcedActions) {
  SimConfig c;
  ResultCache small{scored_slate(5)};
  ResultCache full{scored_slate(32)};
  ResultCache tiny{scored_slate(3)};
  EXPECT_EQ(resolve_action(0, small, 10, c), ServeMode::kRealTime);
  EXPECT_EQ(resolve_action(1, full, 0, c), ServeMode::kCached);
  EXPECT_EQ(resolve_action(1, tiny, 0, c), ServeMode::kFailure);
  EXPECT_EQ(resolve_action(0, full, 0, c), ServeMode::kCached);
  EXPECT_EQ(resolve_action(1, full, 3, c), ServeMode::kRealTime);
}

TEST(ResolveTest, NeverInfeasible) {
  SimConfig c;
  for (std::size_t occ : {0u, 3u, 8u, 16u, 32u}) {
    ResultCache cache{scored_slate(occ)};
    for (std::size_t budget : {0u, 1u}) {
      for (int req : {0, 1}) {
        const auto mode = resolve_action(req, cache, budget, c);
        if (mode == ServeMode::kRealTime) EXPECT_GT(budget, 0u);
        if (mode == ServeMode::kCached) EXPECT_GE(cache.size(), c.slate_size);
        if (mode == ServeMode::kFailure) EXPECT_TRUE(budget == 0 && cache.size() < c.slate_size);
      }
    }
  }
}

TEST(StepTest, Composition) {
  SimConfig c;
  Simulator sim(c);
  const auto requests = sim.begin_hour(0);
  ASSERT_FALSE(requests.empty());
  const auto& r = requests[0];
  sim.arrive(r);
  const auto rt = sim.step(r, ServeMode::kRealTime);
  EXPECT_EQ(rt.after.consecutive_cached, 0u);
  EXPECT_EQ(rt.after.cache_occupancy, c.cache_capacity());
  EXPECT_EQ(rt.slate.size(), c.slate_size);
  EXPECT_EQ(rt.done, !rt.outcome.continued);
  EXPECT_EQ(rt.after.session_active, !rt.done);

  sim.arrive(r);
  sim.step(r, ServeMode::kCached);
  sim.arrive(r);
  const auto cached = sim.step(r, ServeMode::kCached);
  EXPECT_EQ(cached.before.cache_occupancy, 24u);
  EXPECT_EQ(cached.after.cache_occupancy, 16u);
  EXPECT_EQ(cached.after.consecutive_cached, 2u);
}

TEST(StepTest, FailureEndsSession) {
  SimConfig c;
  Simulator sim(c);
  const auto r = sim.begin_hour(0).front();
  sim.arrive(r);
  const auto out = sim.step(r, ServeMode::kFailure);
  EXPECT_TRUE(out.done);
  EXPECT_EQ(out.outcome.watch_time, 0.0);
  EXPECT_FALSE(sim.user(r.user_id).session_active);
  EXPECT_THROW(sim.step(r, ServeMode::kRealTime), std::logic_error);
}

TEST(StepTest, CachedOnShortCacheThrows) {
  SimConfig c;
  Simulator sim(c);
  const auto r = sim.begin_hour(0).front();
  sim.arrive(r);
  EXPECT_THROW(sim.step(r, ServeMode::kCached), std::logic_error);
}

TEST(StepTest, PreviewMatchesServedSlate) {
  SimConfig c;
  Simulator sim(c);
  const auto r = sim.begin_hour(3).front();
  sim.arrive(r);
  const auto preview = sim.preview_candidates(r);
  const auto out = sim.step(r, ServeMode::kRealTime);
  for (std::size_t k = 0; k < c.slate_size; ++k) EXPECT_EQ(out.slate[k].id, preview[k].id);
}

// Random serve sequences keep the cache and counter laws.
TEST(SimPropertyTest, CacheConservationAndCounterLaw) {
  SimConfig c;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    c.seed = seed;
    Simulator sim(c);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> cached_since(c.num_users, 0);
    for (std::size_t h = 0; h < 6; ++h) {
      for (const auto& r : sim.begin_hour(h)) {
        sim.arrive(r);
        const std::size_t old = sim.cache(r.user_id).size();
        const int want = static_cast<int>(rng() % 2);
        const auto mode = resolve_action(want, sim.cache(r.user_id), rng() % 3, c);
        const auto out = sim.step(r, mode);
        const std::size_t now = sim.cache(r.user_id).size();
        if (mode == ServeMode::kRealTime) {
          EXPECT_EQ(now, c.cache_capacity());
          cached_since[r.user_id] = 0;
        } else if (mode == ServeMode::kCached) {
          EXPECT_EQ(now, old - c.slate_size);
          cached_since[r.user_id] += 1;
        } else {
          EXPECT_EQ(now, old);
        }
        EXPECT_LE(now, c.cache_capacity());
        EXPECT_EQ(out.after.consecutive_cached, cached_since[r.user_id]);
        EXPECT_EQ(out.after.cache_occupancy, now);
        EXPECT_GE(out.outcome.watch_time, 0.0);
      }
    }
  }
}

TEST(SimPropertyTest, DeterministicStreams) {
  SimConfig c;
  auto run = [&] {
    Simulator sim(c);
    std::vector<double> trace;
    for (std::size_t h = 0; h < 4; ++h) {
      for (const auto& r : sim.begin_hour(h)) {
        sim.arrive(r);
        const auto mode = resolve_action(static_cast<int>(r.arrival % 2), sim.cache(r.user_id), 1, c);
        const auto out = sim.step(r, mode);
        trace.push_back(out.outcome.watch_time);
        trace.push_back(out.done ? 1.0 : 0.0);
      }
    }
    return trace;
  };
  EXPECT_EQ(run(), run());
}

TEST(ConfigTest, ValidationRejectsBadValues) {
  SimConfig c;
  c.realtime_return = c.slate_size;
  EXPECT_THROW(c.validate(), ConfigError);
  SimConfig d;
  d.traffic_min = 500;
  EXPECT_THROW(d.validate(), ConfigError);
  SimConfig e;
  e.preference_dim = 0;
  EXPECT_THROW(Simulator{e}, ConfigError);
}

}  // namespace
}  // namespace rpaf::sim
