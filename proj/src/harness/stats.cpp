#include "rpaf/harness/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace rpaf::harness {

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  out.n = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(out.n);
  if (out.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(out.n - 1));
  }
  return out;
}

PairedTest paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_t_test: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("paired_t_test: need at least two pairs");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const auto d = mean_std(diff);

  PairedTest out;
  out.n = a.size();
  out.mean_diff = d.mean;
  if (d.stddev == 0.0) {
    // Every pair differs by the same amount.
    out.t_statistic = d.mean == 0.0 ? 0.0 : std::copysign(INFINITY, d.mean);
    out.p_two_sided = d.mean == 0.0 ? 1.0 : 0.0;
    out.p_greater = d.mean > 0.0 ? 0.0 : 1.0;
    return out;
  }
  out.t_statistic = d.mean / (d.stddev / std::sqrt(static_cast<double>(out.n)));
  const boost::math::students_t dist(static_cast<double>(out.n - 1));
  out.p_greater = boost::math::cdf(boost::math::complement(dist, out.t_statistic));
  out.p_two_sided = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.t_statistic)));
  return out;
}

}  // namespace rpaf::harness
