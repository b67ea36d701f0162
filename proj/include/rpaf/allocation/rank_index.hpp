#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "rpaf/allocation/budget_ledger.hpp"

namespace rpaf::allocation {

/// Number of buckets at resolution eta: ceil(1 / eta).
std::size_t bucket_count(double eta);

/// floor(a / eta) clamped to the last bucket. A tiny slack absorbs quotients
/// such as 0.37 / 0.01 landing just below an integer.
std::size_t bucketize(double a_tilde, double eta);

/// A[i] = sum of counts[j] for j > i.
std::vector<std::uint64_t> strict_suffix_sums(const std::vector<std::uint64_t>& counts);

/// Bucketized pool of relaxed actions for streaming rank queries.
///
/// The current period's actions are counted in atomic cells. At the period
/// boundary the counts are turned into a rank array and published as an
/// immutable snapshot in one atomic pointer swap; readers holding the old
/// snapshot are never disturbed.
class RankIndex {
 public:
  /// Throws std::invalid_argument unless 0 < eta < 1.
  explicit RankIndex(double eta);

  double resolution() const { return eta_; }
  std::size_t bucket_count() const { return counts_.size(); }
  std::size_t bucket_of(double a_tilde) const { return bucketize(a_tilde, eta_); }

  /// Previous-period entries in buckets strictly above `bucket`.
  std::uint64_t rank_of_bucket(std::size_t bucket) const;
  std::uint64_t rank_lookup(double a_tilde) const;

  /// Adds a_tilde to the current period's pool.
  void record(double a_tilde);

  /// Publishes the current pool as the online rank array and clears it.
  void rotate_period();

  /// Replaces the online rank array. Throws std::invalid_argument on a
  /// length mismatch.
  void publish(std::vector<std::uint64_t> ranks);

  std::shared_ptr<const std::vector<std::uint64_t>> snapshot() const;
  std::vector<std::uint64_t> current_counts() const;

 private:
  double eta_;
  std::vector<std::atomic<std::uint64_t>> counts_;
  std::shared_ptr<const std::vector<std::uint64_t>> online_;
};

struct Decision {
  int action = 0;
  std::uint64_t rank = 0;
  bool downgraded = false;  // rank admitted but the quota was spent
};

/// Admit iff rank < M (the ledger's budget), then enforce the quota. The
/// action is always recorded into the current pool.
Decision decide(RankIndex& index, BudgetLedger& ledger, double a_tilde);

}  // namespace rpaf::allocation
