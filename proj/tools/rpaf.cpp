// Command-line driver: train, evaluate, check, report.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rpaf/harness/experiment_config.hpp"
#include "rpaf/harness/experiments.hpp"
#include "rpaf/harness/property_checks.hpp"
#include "rpaf/harness/report.hpp"
#include "rpaf/harness/stats.hpp"
#include "rpaf/nn/checkpoint.hpp"

namespace fs = std::filesystem;
using namespace rpaf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string method;
  std::string backbone;
  std::string penalty;
  std::string out;
  std::optional<std::size_t> trials;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file (defaults apply when omitted)");
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--method", f.method, "greedy | all-realtime | oracle-myopic | rpaf-nopool | rpaf");
  cmd->add_option("--backbone", f.backbone, "ddpg | td3");
  cmd->add_option("--penalty", f.penalty, "mse | kl | none");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--trials", f.trials, "evaluation trials");
}

harness::ExperimentConfig resolve(const CommonFlags& f) {
  harness::ExperimentConfig c =
      f.config_path.empty() ? harness::ExperimentConfig{} : harness::load_experiment_config(f.config_path);
  try {
    if (f.seed) c.sim.seed = *f.seed;
    if (!f.method.empty()) c.method = harness::parse_method(f.method);
    if (!f.backbone.empty()) c.trainer.backbone = prediction::parse_backbone(f.backbone);
    if (!f.penalty.empty()) c.trainer.penalty.kind = prediction::parse_penalty(f.penalty);
  } catch (const std::invalid_argument& e) {
    throw sim::ConfigError(e.what());
  }
  if (!f.out.empty()) c.output_dir = f.out;
  if (f.trials) c.trials = *f.trials;
  c.trainer.budget = c.sim.hourly_budget;
  c.trainer.seed = c.sim.seed;
  c.validate();
  return c;
}

int cmd_train(const CommonFlags& f, const std::string& init_path) {
  const auto config = resolve(f);
  std::vector<nn::DenseNet> init;
  if (!init_path.empty()) init = nn::load_checkpoint(init_path);
  const fs::path out = config.output_dir;
  fs::create_directories(out);
  std::ofstream(out / "config.json") << harness::dump_experiment_config(config);
  const auto result = harness::run_collect_train(config, out, init);
  if (!result.records.empty()) {
    const auto& last = result.records.back();
    std::printf("trained %zu epochs; last hour: critic_loss %.4g, mean a~ %.4f, mean m_t %.4f\n",
                config.train_epochs, last.critic_loss, last.mean_a_tilde, last.mean_m_t);
  }
  std::printf("wrote %s and %s\n", (out / "training.csv").c_str(), (out / "checkpoint.bin").c_str());
  return kExitOk;
}

int cmd_evaluate(const CommonFlags& f, const std::string& checkpoint_flag) {
  const auto config = resolve(f);
  const fs::path out = config.output_dir;
  const fs::path checkpoint = checkpoint_flag.empty() ? out / "checkpoint.bin" : fs::path(checkpoint_flag);
  const auto result = harness::run_evaluate(config, checkpoint);
  harness::emit_report(result.summary, result.trials, out);
  std::cout << harness::format_summary(result.summary);
  return kExitOk;
}

int cmd_check(const CommonFlags& f, bool corrupt) {
  harness::PropertyCheckOptions options;
  if (!f.config_path.empty()) options.sim = harness::load_experiment_config(f.config_path).sim;
  if (f.seed) options.seed = *f.seed;
  options.corrupt_rank_array = corrupt;
  const auto results = harness::run_property_checks(options);
  std::cout << harness::format_checks(results);
  return harness::all_passed(results) ? kExitOk : kExitCheckFailed;
}

int cmd_report(const CommonFlags& f) {
  const fs::path out = f.out.empty() ? fs::path("out") : fs::path(f.out);
  std::map<std::string, harness::MethodSummary> summaries;
  if (fs::is_directory(out)) {
    for (const auto& entry : fs::directory_iterator(out)) {
      if (entry.is_directory() && fs::exists(entry.path() / "summary.txt")) {
        auto s = harness::load_report(entry.path());
        summaries.emplace(s.method, std::move(s));
      }
    }
  }
  if (summaries.empty()) throw harness::ReportError("no method reports under " + out.string());
  for (const auto& [name, s] : summaries) {
    std::printf("%-14s %10.2f +- %8.2f  (%zu trials)\n", name.c_str(), s.stats.mean, s.stats.stddev,
                s.watch_times.size());
  }
  const auto greedy = summaries.find("greedy");
  if (greedy != summaries.end()) {
    for (const auto& [name, s] : summaries) {
      if (name == "greedy" || s.seeds != greedy->second.seeds || s.seeds.size() < 2) continue;
      const auto t = harness::paired_t_test(s.watch_times, greedy->second.watch_times);
      std::printf("%s vs greedy: mean diff %.3f, t %.3f, p(two-sided) %.3g\n", name.c_str(),
                  t.mean_diff, t.t_statistic, t.p_two_sided);
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prediction-allocation workbench for result-cache serving under hourly budgets"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string checkpoint;
  bool corrupt = false;
  auto* train = app.add_subcommand("train", "collect data and train the actor-critic");
  add_common(train, flags);
  std::string init;
  train->add_option("--init", init, "warm-start from this checkpoint");
  auto* evaluate = app.add_subcommand("evaluate", "evaluate one method over several seeds");
  add_common(evaluate, flags);
  evaluate->add_option("--checkpoint", checkpoint, "checkpoint path (default <out>/checkpoint.bin)");
  auto* check = app.add_subcommand("check", "run the property checks");
  add_common(check, flags);
  check->add_flag("--corrupt-rank-array", corrupt, "negative control: corrupt the rank array");
  auto* report = app.add_subcommand("report", "summarize evaluation outputs under --out");
  add_common(report, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (train->parsed()) return cmd_train(flags, init);
    if (evaluate->parsed()) return cmd_evaluate(flags, checkpoint);
    if (check->parsed()) return cmd_check(flags, corrupt);
    if (report->parsed()) return cmd_report(flags);
  } catch (const sim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const nn::CheckpointError& e) {
    std::fprintf(stderr, "checkpoint error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}
