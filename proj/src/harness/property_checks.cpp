#include "rpaf/harness/property_checks.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <sstream>

#include "rpaf/allocation/allocators.hpp"
#include "rpaf/allocation/rank_index.hpp"
#include "rpaf/harness/episode.hpp"
#include "rpaf/prediction/losses.hpp"
#include "rpaf/prediction/networks.hpp"
#include "rpaf/prediction/state_encoding.hpp"

namespace rpaf::harness {
namespace {

using Clock = std::chrono::steady_clock;

CheckResult timed(const std::string& name, const std::function<std::string(bool&)>& body) {
  CheckResult r;
  r.name = name;
  const auto start = Clock::now();
  r.passed = true;
  r.detail = body(r.passed);
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

// True when a's sorted index list precedes b's (equal popcounts).
bool lexicographically_less(std::uint32_t a, std::uint32_t b) {
  while (a != 0 && b != 0) {
    const std::uint32_t la = a & (~a + 1);
    const std::uint32_t lb = b & (~b + 1);
    if (la != lb) return la < lb;
    a ^= la;
    b ^= lb;
  }
  return false;
}

// Lexicographically smallest index set among the maximum-sum subsets of size m.
std::vector<int> best_subset(const std::vector<double>& values, std::size_t m) {
  const std::size_t n = values.size();
  double best_sum = -INFINITY;
  std::uint32_t best_mask = 0;
  bool found = false;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != m) continue;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) sum += values[i];
    }
    if (!found || sum > best_sum || (sum == best_sum && lexicographically_less(mask, best_mask))) {
      found = true;
      best_sum = sum;
      best_mask = mask;
    }
  }
  std::vector<int> chosen(n, 0);
  for (std::size_t i = 0; i < n; ++i) chosen[i] = static_cast<int>((best_mask >> i) & 1u);
  return chosen;
}

// Smallest |pre-activation| over the rectifier units. Central differences
// are meaningless when a step of size h can cross a kink.
double relu_margin(const nn::DenseNet& net, std::span<const double> input) {
  const auto cache = net.forward(input);
  const auto params = net.parameters();
  double margin = INFINITY;
  for (std::size_t li = 0; li < net.layer_count(); ++li) {
    const auto& layer = net.layers()[li];
    if (layer.activation != nn::Activation::kRelu) continue;
    const auto& x = cache.values[li];
    for (std::size_t r = 0; r < layer.outputs; ++r) {
      double z = params[layer.bias_offset + r];
      for (std::size_t c = 0; c < layer.inputs; ++c) {
        z += params[layer.weight_offset + r * layer.inputs + c] * x[c];
      }
      margin = std::min(margin, std::abs(z));
    }
  }
  return margin;
}

double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-6});
  return std::abs(a - b) / scale;
}

}  // namespace

double relaxed_minimizer(double q0, double q1, double m, const prediction::Penalty& penalty,
                         double grid) {
  const auto steps = static_cast<long>(std::llround(1.0 / grid));
  double best_a = 0.0;
  double best = INFINITY;
  for (long k = 0; k <= steps; ++k) {
    const double a = static_cast<double>(k) * grid;
    if (penalty.kind == prediction::PenaltyKind::kKl && (k == 0 || k == steps)) continue;
    const double f =
        -prediction::critic_value(prediction::QPair{q0, q1}, a) + prediction::penalty(penalty, a, m).value;
    if (f < best) {
      best = f;
      best_a = a;
    }
  }
  return best_a;
}

CheckResult check_oracle_equivalence(const PropertyCheckOptions& options) {
  return timed("oracle-equivalence", [&](bool& ok) {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> small(0, 3);
    std::size_t cases = 0;
    std::size_t mismatches = 0;
    for (std::size_t n = 1; n <= options.oracle_max_n; ++n) {
      for (std::size_t v = 0; v < options.oracle_vectors; ++v) {
        std::vector<double> values(n);
        // Every other vector uses a few integer levels so ties are common.
        for (auto& x : values) x = v % 2 == 0 ? normal(rng) : static_cast<double>(small(rng));
        for (std::size_t m = 1; m <= n; ++m) {
          ++cases;
          const auto fast = allocation::batch_oracle(values, m);
          const auto exact = best_subset(values, m);
          if (fast != exact) ++mismatches;
        }
      }
    }
    ok = mismatches == 0;
    std::ostringstream out;
    out << cases << " cases, " << mismatches << " mismatches";
    return out.str();
  });
}

CheckResult check_monotonicity(const PropertyCheckOptions&) {
  return timed("monotonicity", [&](bool& ok) {
    constexpr double kGrid = 1e-3;
    std::size_t sweeps = 0;
    std::size_t violations = 0;
    for (double alpha : {0.5, 1.0, 2.0}) {
      for (auto kind : {prediction::PenaltyKind::kMse, prediction::PenaltyKind::kKl}) {
        for (double m : {0.1, 0.3, 0.5, 0.9}) {
          for (double q0 : {-1.0, 0.0, 2.5}) {
            ++sweeps;
            double previous = -INFINITY;
            for (int k = 0; k <= 100; ++k) {
              const double dq = -5.0 + 0.1 * k;
              const double a = relaxed_minimizer(q0, q0 + dq, m, {kind, alpha}, kGrid);
              if (a < previous - kGrid - 1e-12) ++violations;
              previous = std::max(previous, a);
            }
          }
        }
      }
    }
    ok = violations == 0;
    std::ostringstream out;
    out << sweeps << " sweeps, " << violations << " decreases beyond one grid cell";
    return out.str();
  });
}

CheckResult check_jensen(const PropertyCheckOptions& options) {
  return timed("jensen-bound", [&](bool& ok) {
    std::mt19937_64 rng(options.seed + 1);
    std::uniform_real_distribution<double> unit(1e-3, 1.0 - 1e-3);
    std::size_t violations = 0;
    double worst = -INFINITY;
    for (std::size_t b = 0; b < options.jensen_batches; ++b) {
      const double m = unit(rng);
      std::vector<double> a(options.jensen_batch_size);
      for (auto& x : a) x = unit(rng);
      double mean_a = 0.0;
      for (double x : a) mean_a += x;
      mean_a /= static_cast<double>(a.size());
      for (auto kind : {prediction::PenaltyKind::kMse, prediction::PenaltyKind::kKl}) {
        double mean_t = 0.0;
        for (double x : a) mean_t += prediction::penalty(kind, x, m).value;
        mean_t /= static_cast<double>(a.size());
        const double gap = prediction::penalty(kind, mean_a, m).value - mean_t;
        worst = std::max(worst, gap);
        if (gap > 1e-12) ++violations;
      }
    }
    ok = violations == 0;
    std::ostringstream out;
    out << 2 * options.jensen_batches << " batch evaluations, max T(mean) - mean T = " << worst;
    return out.str();
  });
}

CheckResult check_gradients(const PropertyCheckOptions& options) {
  return timed("gradients", [&](bool& ok) {
    constexpr double kStep = 1e-5;
    constexpr double kTolerance = 1e-4;
    std::mt19937_64 rng(options.seed + 2);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    const prediction::NetworkShape shape{6, 3};
    constexpr std::size_t kDim = 5;
    double worst = 0.0;
    std::size_t coordinates = 0;
    for (std::size_t trial = 0; trial < options.gradient_nets; ++trial) {
      prediction::NetPair actor(prediction::make_actor(kDim, shape), rng);
      prediction::NetPair critic(prediction::make_critic(kDim, shape), rng);
      for (auto& p : critic.online.parameters()) p += 0.1 * normal(rng);
      std::vector<double> state(kDim);
      do {
        for (auto& x : state) x = normal(rng);
      } while (relu_margin(actor.online, state) < 1e-3 || relu_margin(critic.online, state) < 1e-3);
      const double m = unit(rng);
      const prediction::Penalty pen{trial % 2 == 0 ? prediction::PenaltyKind::kMse
                                                   : prediction::PenaltyKind::kKl,
                                    0.5 + unit(rng)};

      std::vector<double> grad(actor.online.parameter_count(), 0.0);
      prediction::actor_loss(actor.online, critic.online, state, m, pen, grad);
      auto params = actor.online.parameters();
      std::vector<double> scratch;
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + kStep;
        const double up = prediction::actor_loss(actor.online, critic.online, state, m, pen,
                                                 (scratch.assign(grad.size(), 0.0), scratch)).loss;
        params[i] = saved - kStep;
        const double down = prediction::actor_loss(actor.online, critic.online, state, m, pen,
                                                   (scratch.assign(grad.size(), 0.0), scratch)).loss;
        params[i] = saved;
        const double numeric = (up - down) / (2.0 * kStep);
        worst = std::max(worst, relative_error(grad[i], numeric));
        ++coordinates;
      }

      const int action = static_cast<int>(trial % 2);
      const double target = normal(rng);
      std::vector<double> cgrad(critic.online.parameter_count(), 0.0);
      prediction::critic_loss(critic.online, state, action, target, cgrad);
      auto cparams = critic.online.parameters();
      for (std::size_t i = 0; i < cparams.size(); ++i) {
        const double saved = cparams[i];
        scratch.assign(cgrad.size(), 0.0);
        cparams[i] = saved + kStep;
        const double up = prediction::critic_loss(critic.online, state, action, target, scratch).loss;
        cparams[i] = saved - kStep;
        const double down = prediction::critic_loss(critic.online, state, action, target, scratch).loss;
        cparams[i] = saved;
        const double numeric = (up - down) / (2.0 * kStep);
        worst = std::max(worst, relative_error(cgrad[i], numeric));
        ++coordinates;
      }
    }
    ok = worst <= kTolerance;
    std::ostringstream out;
    out << coordinates << " coordinates, worst relative error " << worst;
    return out.str();
  });
}

CheckResult check_budget_strictness(const PropertyCheckOptions& options) {
  return timed("budget-strictness", [&](bool& ok) {
    sim::SimConfig config = options.sim;
    config.hours = options.budget_hours;
    std::mt19937_64 rng(options.seed + 3);
    const auto actor = prediction::NetPair(
        prediction::make_actor(prediction::state_dim(config), prediction::NetworkShape{}), rng);
    std::size_t hours = 0;
    std::size_t violations = 0;
    for (auto method : {Method::kGreedy, Method::kOracleMyopic, Method::kRpafNoPool, Method::kRpaf}) {
      for (std::size_t s = 0; s < options.budget_seeds; ++s) {
        config.seed = options.seed + s;
        EpisodeOptions eo;
        eo.method = method;
        eo.actor = &actor.online;
        const auto episode = run_episode(config, eo);
        for (const auto& h : episode.hours) {
          ++hours;
          if (h.realtime > h.budget || h.realtime + h.cached + h.failures != h.requests) ++violations;
        }
      }
    }
    ok = violations == 0;
    std::ostringstream out;
    out << hours << " method-hours, " << violations << " violations";
    return out.str();
  });
}

CheckResult check_rank_consistency(const PropertyCheckOptions& options) {
  return timed("rank-consistency", [&](bool& ok) {
    std::mt19937_64 rng(options.seed + 4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t queries = 0;
    std::size_t violations = 0;
    for (double eta : {0.1, 0.01, 0.001}) {
      allocation::RankIndex index(eta);
      std::vector<double> pool(2000);
      for (auto& x : pool) {
        x = unit(rng);
        x = x * x;  // skewed toward 0
        index.record(x);
      }
      const auto counts = index.current_counts();
      index.rotate_period();
      if (options.corrupt_rank_array) {
        auto ranks = *index.snapshot();
        std::reverse(ranks.begin(), ranks.end());
        index.publish(std::move(ranks));
      }
      std::sort(pool.begin(), pool.end());
      for (int q = 0; q < 500; ++q) {
        const double a = q < 250 ? unit(rng) : pool[static_cast<std::size_t>(q) % pool.size()];
        const auto strictly_greater = static_cast<std::uint64_t>(
            pool.end() - std::upper_bound(pool.begin(), pool.end(), a));
        const auto estimate = index.rank_lookup(a);
        const auto own_bucket = counts[index.bucket_of(a)];
        const auto diff = estimate > strictly_greater ? estimate - strictly_greater
                                                      : strictly_greater - estimate;
        ++queries;
        if (diff > own_bucket) ++violations;
      }
    }
    ok = violations == 0;
    std::ostringstream out;
    out << queries << " queries, " << violations << " outside the own-bucket bound";
    return out.str();
  });
}

std::vector<CheckResult> run_property_checks(const PropertyCheckOptions& options) {
  return {check_oracle_equivalence(options), check_monotonicity(options),
          check_jensen(options),             check_gradients(options),
          check_budget_strictness(options),  check_rank_consistency(options)};
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

std::string format_checks(const std::vector<CheckResult>& results) {
  std::ostringstream out;
  for (const auto& r : results) {
    char secs[32];
    std::snprintf(secs, sizeof(secs), "%.2fs", r.seconds);
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << secs << "): " << r.detail << '\n';
  }
  return out.str();
}

}  // namespace rpaf::harness
