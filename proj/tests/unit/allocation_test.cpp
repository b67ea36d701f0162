#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <thread>

#include "rpaf/allocation/allocators.hpp"
#include "rpaf/allocation/budget_ledger.hpp"
#include "rpaf/allocation/rank_index.hpp"

namespace rpaf::allocation {
namespace {

// Exhaustive search over all M-subsets; the lexicographically smallest index
// set among the maximizers wins, matching the lower-index tie rule.
std::vector<int> brute_force_best(const std::vector<double>& v, std::size_t m) {
  const std::size_t n = v.size();
  std::vector<int> best;
  double best_sum = -INFINITY;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != m) continue;
    double sum = 0.0;
    std::vector<int> pick(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        pick[i] = 1;
        sum += v[i];
      }
    }
    // Among equal sums prefer more ones at low indices.
    if (sum > best_sum || (sum == best_sum && pick > best)) {
      best_sum = sum;
      best = pick;
    }
  }
  return best;
}

TEST(BatchOracleTest, Examples) {
  EXPECT_EQ(batch_oracle(std::vector<double>{0.9, 0.1, 0.5, 0.7}, 2), (std::vector<int>{1, 0, 0, 1}));
  EXPECT_EQ(batch_oracle(std::vector<double>{1.0, 1.0, 1.0}, 1), (std::vector<int>{1, 0, 0}));
  EXPECT_EQ(batch_oracle(std::vector<double>{-1.0, -2.0}, 0), (std::vector<int>{0, 0}));
  EXPECT_THROW(batch_oracle(std::vector<double>{1.0}, 2), std::invalid_argument);
}

TEST(BatchOracleTest, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    const std::size_t m = rng() % (n + 1);
    std::vector<double> v(n);
    for (auto& x : v) {
      x = trial % 2 == 0 ? static_cast<double>(rng() % 4)
                         : std::normal_distribution<double>(0.0, 1.0)(rng);
    }
    ASSERT_EQ(batch_oracle(v, m), brute_force_best(v, m)) << "trial " << trial;
  }
}

TEST(GreedyTest, FirstMArrivalsOnly) {
  BudgetLedger ledger(3);
  std::vector<int> got;
  for (int i = 0; i < 6; ++i) got.push_back(greedy_allocator(ledger));
  EXPECT_EQ(got, (std::vector<int>{1, 1, 1, 0, 0, 0}));
  EXPECT_EQ(all_realtime_allocator(), 1);
}

TEST(BudgetLedgerTest, ResetAndLimits) {
  EXPECT_THROW(BudgetLedger(0), std::invalid_argument);
  BudgetLedger ledger(2, 5);
  EXPECT_TRUE(ledger.try_consume());
  EXPECT_TRUE(ledger.try_consume());
  EXPECT_FALSE(ledger.try_consume());
  EXPECT_EQ(ledger.consumed(), 2u);
  EXPECT_EQ(ledger.remaining(), 0u);
  ledger.reset(6);
  EXPECT_EQ(ledger.period(), 6u);
  EXPECT_EQ(ledger.consumed(), 0u);
}

TEST(BudgetLedgerTest, ConcurrentConsumersNeverOverdraw) {
  BudgetLedger ledger(1000);
  std::atomic<int> granted{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 500; ++i) {
        if (ledger.try_consume()) granted.fetch_add(1);
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(granted.load(), 1000);
  EXPECT_EQ(ledger.consumed(), 1000u);
}

TEST(RankIndexTest, BucketsAndSuffixSums) {
  EXPECT_EQ(bucket_count(0.1), 10u);
  EXPECT_EQ(bucket_count(0.001), 1000u);
  EXPECT_EQ(bucket_count(0.3), 4u);
  EXPECT_EQ(bucketize(0.37, 0.01), 37u);
  EXPECT_EQ(bucketize(1.0, 0.1), 9u);
  EXPECT_EQ(bucketize(0.0, 0.1), 0u);
  EXPECT_EQ(strict_suffix_sums({1, 2, 3, 4}), (std::vector<std::uint64_t>{9, 7, 4, 0}));
  EXPECT_THROW(RankIndex(0.0), std::invalid_argument);
  EXPECT_THROW(RankIndex(1.0), std::invalid_argument);
}

TEST(RankIndexTest, LookupExample) {
  RankIndex index(0.1);
  for (double a : {0.9, 0.8, 0.7}) index.record(a);
  EXPECT_EQ(index.rank_lookup(0.85), 0u);  // nothing published yet
  index.rotate_period();
  EXPECT_EQ(index.rank_lookup(0.85), 1u);
  EXPECT_EQ(index.rank_lookup(0.95), 0u);
  EXPECT_EQ(index.rank_lookup(0.05), 3u);
  // Only the previous period counts.
  index.record(0.01);
  index.rotate_period();
  EXPECT_EQ(index.rank_lookup(0.85), 0u);
  EXPECT_EQ(index.rank_lookup(0.0), 0u);
  EXPECT_THROW(index.publish({1, 2}), std::invalid_argument);
}

TEST(RankIndexTest, StaticPoolRankWithinOwnBucket) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double eta : {0.1, 0.01, 0.001}) {
    RankIndex index(eta);
    std::vector<double> pool(500);
    for (auto& a : pool) {
      a = unit(rng);
      index.record(a);
    }
    index.rotate_period();
    for (int q = 0; q < 200; ++q) {
      const double a = unit(rng);
      const auto exact = static_cast<std::uint64_t>(
          std::count_if(pool.begin(), pool.end(), [&](double p) { return p > a; }));
      const auto own = static_cast<std::uint64_t>(std::count_if(
          pool.begin(), pool.end(), [&](double p) { return bucketize(p, eta) == bucketize(a, eta); }));
      const auto rank = index.rank_lookup(a);
      EXPECT_LE(rank, exact);
      EXPECT_LE(exact - rank, own);
    }
  }
}

TEST(RankIndexTest, RankIsMonotoneInAction) {
  RankIndex index(0.01);
  std::mt19937_64 rng(23);
  for (int i = 0; i < 1000; ++i) index.record(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
  index.rotate_period();
  std::uint64_t prev = index.rank_lookup(0.0);
  for (int k = 1; k <= 1000; ++k) {
    const auto r = index.rank_lookup(k / 1000.0);
    EXPECT_LE(r, prev);
    prev = r;
  }
}

TEST(DecideTest, BudgetAndRecording) {
  RankIndex index(0.1);
  BudgetLedger ledger(2);
  // Empty previous pool: every rank is 0, so the ledger alone limits admissions.
  std::vector<int> got;
  for (int i = 0; i < 4; ++i) got.push_back(decide(index, ledger, 0.5).action);
  EXPECT_EQ(got, (std::vector<int>{1, 1, 0, 0}));
  const auto counts = index.current_counts();
  EXPECT_EQ(counts[5], 4u);

  // Previous pool of 4 at 0.5: ranks below 0.5 are 4 >= M.
  index.rotate_period();
  ledger.reset(1);
  const auto low = decide(index, ledger, 0.3);
  EXPECT_EQ(low.action, 0);
  EXPECT_EQ(low.rank, 4u);
  EXPECT_FALSE(low.downgraded);
  const auto high = decide(index, ledger, 0.9);
  EXPECT_EQ(high.action, 1);
  EXPECT_EQ(ledger.consumed(), 1u);
}

TEST(DecideTest, DowngradeWhenQuotaSpent) {
  RankIndex index(0.1);
  BudgetLedger ledger(1);
  EXPECT_EQ(decide(index, ledger, 0.9).action, 1);
  const auto d = decide(index, ledger, 0.9);
  EXPECT_EQ(d.action, 0);
  EXPECT_TRUE(d.downgraded);
}

// Demand of exactly 2M with an empty pool admits the first M arrivals.
TEST(DecideTest, TwiceBudgetDemand) {
  RankIndex index(0.01);
  BudgetLedger ledger(50);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(decide(index, ledger, 0.4).action, i < 50 ? 1 : 0);
}

TEST(DecideTest, ConcurrentDecisionsAndRotation) {
  RankIndex index(0.01);
  BudgetLedger ledger(300);
  std::atomic<bool> stop{false};
  std::thread rotator([&] {
    while (!stop.load()) {
      index.rotate_period();
      const auto snap = index.snapshot();
      ASSERT_EQ(snap->size(), index.bucket_count());
      ASSERT_TRUE(std::is_sorted(snap->rbegin(), snap->rend()));
    }
  });
  std::atomic<int> admitted{0};
  std::vector<std::thread> workers;
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&, t] {
      std::mt19937_64 rng(100 + t);
      for (int i = 0; i < 2000; ++i) {
        if (decide(index, ledger, std::uniform_real_distribution<double>(0.0, 1.0)(rng)).action == 1) {
          admitted.fetch_add(1);
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  stop = true;
  rotator.join();
  EXPECT_LE(admitted.load(), 300);
  EXPECT_EQ(static_cast<std::size_t>(admitted.load()), ledger.consumed());
}

}  // namespace
}  // namespace rpaf::allocation
