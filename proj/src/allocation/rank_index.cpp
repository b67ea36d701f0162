#include "rpaf/allocation/rank_index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rpaf::allocation {
namespace {

constexpr double kSlack = 1e-9;

}  // namespace

std::size_t bucket_count(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("resolution must be in (0, 1)");
  return static_cast<std::size_t>(std::ceil(1.0 / eta - kSlack));
}

std::size_t bucketize(double a_tilde, double eta) {
  const std::size_t n = bucket_count(eta);
  if (!(a_tilde > 0.0)) return 0;
  const auto b = static_cast<std::size_t>(std::floor(a_tilde / eta + kSlack));
  return std::min(b, n - 1);
}

std::vector<std::uint64_t> strict_suffix_sums(const std::vector<std::uint64_t>& counts) {
  std::vector<std::uint64_t> ranks(counts.size(), 0);
  std::uint64_t above = 0;
  for (std::size_t i = counts.size(); i-- > 0;) {
    ranks[i] = above;
    above += counts[i];
  }
  return ranks;
}

RankIndex::RankIndex(double eta)
    : eta_(eta),
      counts_(allocation::bucket_count(eta)),
      online_(std::make_shared<const std::vector<std::uint64_t>>(counts_.size(), 0)) {}

std::uint64_t RankIndex::rank_of_bucket(std::size_t bucket) const {
  return snapshot()->at(bucket);
}

std::uint64_t RankIndex::rank_lookup(double a_tilde) const {
  return rank_of_bucket(bucket_of(a_tilde));
}

void RankIndex::record(double a_tilde) {
  counts_[bucket_of(a_tilde)].fetch_add(1, std::memory_order_relaxed);
}

void RankIndex::rotate_period() {
  std::vector<std::uint64_t> finished(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    finished[i] = counts_[i].exchange(0, std::memory_order_acq_rel);
  }
  publish(strict_suffix_sums(finished));
}

void RankIndex::publish(std::vector<std::uint64_t> ranks) {
  if (ranks.size() != counts_.size()) throw std::invalid_argument("rank array length mismatch");
  std::atomic_store_explicit(&online_,
                             std::shared_ptr<const std::vector<std::uint64_t>>(
                                 std::make_shared<std::vector<std::uint64_t>>(std::move(ranks))),
                             std::memory_order_release);
}

std::shared_ptr<const std::vector<std::uint64_t>> RankIndex::snapshot() const {
  return std::atomic_load_explicit(&online_, std::memory_order_acquire);
}

std::vector<std::uint64_t> RankIndex::current_counts() const {
  std::vector<std::uint64_t> out(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) out[i] = counts_[i].load(std::memory_order_relaxed);
  return out;
}

Decision decide(RankIndex& index, BudgetLedger& ledger, double a_tilde) {
  Decision d;
  d.rank = index.rank_lookup(a_tilde);
  index.record(a_tilde);
  if (d.rank < ledger.budget()) {
    if (ledger.try_consume()) {
      d.action = 1;
    } else {
      d.downgraded = true;
    }
  }
  return d;
}

}  // namespace rpaf::allocation
