#include "rpaf/harness/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace rpaf::harness {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) parts.push_back(cell);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

std::size_t parse_size(const std::string& text, const std::string& where) {
  std::size_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ReportError("bad integer '" + text + "' in " + where);
  return v;
}

double parse_double(const std::string& text, const std::string& where) {
  if (text == "nan") return std::nan("");
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ReportError("bad number '" + text + "' in " + where);
  }
  return v;
}

std::string trial_file(std::size_t k) {
  char name[32];
  std::snprintf(name, sizeof(name), "trial_%03zu.csv", k);
  return name;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_hourly_csv(std::ostream& out, const std::vector<HourlyMetrics>& rows) {
  out << kHourlyHeader << '\n';
  for (const auto& r : rows) {
    out << r.hour << ',' << r.requests << ',' << r.realtime << ',' << r.cached << ',' << r.failures
        << ',' << r.budget << ',' << format_double(r.watchtime) << ','
        << format_double(r.mean_atilde) << '\n';
  }
}

void write_hourly_csv(const std::filesystem::path& path, const std::vector<HourlyMetrics>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ReportError("cannot write " + path.string());
  write_hourly_csv(out, rows);
  if (!out) throw ReportError("write failed for " + path.string());
}

std::vector<HourlyMetrics> read_hourly_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ReportError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kHourlyHeader) {
    throw ReportError("unexpected header in " + path.string());
  }
  std::vector<HourlyMetrics> rows;
  const std::string where = path.string();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 8) throw ReportError("expected 8 columns in " + where);
    HourlyMetrics r;
    r.hour = parse_size(cells[0], where);
    r.requests = parse_size(cells[1], where);
    r.realtime = parse_size(cells[2], where);
    r.cached = parse_size(cells[3], where);
    r.failures = parse_size(cells[4], where);
    r.budget = parse_size(cells[5], where);
    r.watchtime = parse_double(cells[6], where);
    r.mean_atilde = parse_double(cells[7], where);
    rows.push_back(r);
  }
  return rows;
}

MethodSummary summarize(const std::string& method, std::size_t num_users,
                        const std::vector<std::uint64_t>& seeds,
                        const std::vector<std::vector<HourlyMetrics>>& trials) {
  if (seeds.size() != trials.size()) throw ReportError("one seed per trial required");
  MethodSummary s;
  s.method = method;
  s.num_users = num_users;
  s.seeds = seeds;
  for (const auto& rows : trials) {
    double total = 0.0;
    for (const auto& r : rows) total += r.watchtime;
    s.watch_times.push_back(total / static_cast<double>(num_users));
  }
  s.stats = mean_std(s.watch_times);
  return s;
}

std::string format_summary(const MethodSummary& s) {
  std::ostringstream out;
  out << "method " << s.method << '\n';
  out << "num_users " << s.num_users << '\n';
  out << "trials " << s.watch_times.size() << '\n';
  for (std::size_t k = 0; k < s.watch_times.size(); ++k) {
    out << "trial " << k << " seed " << s.seeds[k] << " watchtime " << format_double(s.watch_times[k])
        << '\n';
  }
  out << "watchtime_mean " << format_double(s.stats.mean) << '\n';
  out << "watchtime_std " << format_double(s.stats.stddev) << '\n';
  out << std::fixed << std::setprecision(1) << s.method << ": " << s.stats.mean << " +- "
      << s.stats.stddev << " s per user over " << s.watch_times.size() << " trials\n";
  return out.str();
}

void emit_report(const MethodSummary& summary, const std::vector<std::vector<HourlyMetrics>>& trials,
                 const std::filesystem::path& dir) {
  if (trials.empty()) throw ReportError("emit_report: no metrics");
  const auto method_dir = dir / summary.method;
  std::error_code ec;
  std::filesystem::create_directories(method_dir, ec);
  if (ec) throw ReportError("cannot create " + method_dir.string() + ": " + ec.message());
  for (std::size_t k = 0; k < trials.size(); ++k) {
    write_hourly_csv(method_dir / trial_file(k), trials[k]);
  }
  std::ofstream out(method_dir / "summary.txt", std::ios::trunc);
  if (!out) throw ReportError("cannot write summary in " + method_dir.string());
  out << format_summary(summary);
}

MethodSummary load_report(const std::filesystem::path& method_dir) {
  std::ifstream in(method_dir / "summary.txt");
  if (!in) throw ReportError("no summary.txt in " + method_dir.string());
  std::string method;
  std::size_t num_users = 0;
  std::size_t trials = 0;
  std::vector<std::uint64_t> seeds;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    if (key == "method") {
      fields >> method;
    } else if (key == "num_users") {
      fields >> num_users;
    } else if (key == "trials") {
      fields >> trials;
    } else if (key == "trial") {
      std::size_t k = 0;
      std::string seed_word;
      std::uint64_t seed = 0;
      fields >> k >> seed_word >> seed;
      seeds.push_back(seed);
    }
  }
  if (method.empty() || num_users == 0 || trials == 0 || seeds.size() != trials) {
    throw ReportError("malformed summary in " + method_dir.string());
  }
  std::vector<std::vector<HourlyMetrics>> rows;
  for (std::size_t k = 0; k < trials; ++k) rows.push_back(read_hourly_csv(method_dir / trial_file(k)));
  return summarize(method, num_users, seeds, rows);
}

}  // namespace rpaf::harness
