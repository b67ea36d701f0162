#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rpaf/harness/episode.hpp"
#include "rpaf/harness/stats.hpp"

namespace rpaf::harness {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kHourlyHeader =
    "hour,requests,realtime,cached,failures,budget,watchtime,mean_atilde";

/// Shortest text that parses back to the same double ("nan" for NaN).
std::string format_double(double value);

void write_hourly_csv(std::ostream& out, const std::vector<HourlyMetrics>& rows);
void write_hourly_csv(const std::filesystem::path& path, const std::vector<HourlyMetrics>& rows);

/// Throws ReportError on a missing file, a wrong header or a malformed row.
std::vector<HourlyMetrics> read_hourly_csv(const std::filesystem::path& path);

struct MethodSummary {
  std::string method;
  std::size_t num_users = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> watch_times;  // per trial, seconds per user
  MeanStd stats;
};

MethodSummary summarize(const std::string& method, std::size_t num_users,
                        const std::vector<std::uint64_t>& seeds,
                        const std::vector<std::vector<HourlyMetrics>>& trials);

std::string format_summary(const MethodSummary& summary);

/// Writes <dir>/<method>/trial_<k>.csv for every trial plus
/// <dir>/<method>/summary.txt. Throws ReportError when nothing is given or a
/// file cannot be written.
void emit_report(const MethodSummary& summary, const std::vector<std::vector<HourlyMetrics>>& trials,
                 const std::filesystem::path& dir);

/// Rebuilds a method's summary from the files emit_report wrote.
MethodSummary load_report(const std::filesystem::path& method_dir);

}  // namespace rpaf::harness
