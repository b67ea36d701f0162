#include <benchmark/benchmark.h>

#include <random>

#include "rpaf/allocation/rank_index.hpp"
#include "rpaf/harness/episode.hpp"
#include "rpaf/harness/experiments.hpp"
#include "rpaf/parallel/batch_reduce.hpp"
#include "rpaf/prediction/state_encoding.hpp"
#include "rpaf/prediction/trainer.hpp"

namespace {

using namespace rpaf;

void fill_buffer(prediction::ReplayBuffer& buffer, std::size_t dim, std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    prediction::Transition t;
    t.state.resize(dim);
    t.next_state.resize(dim);
    for (auto& x : t.state) x = normal(rng);
    for (auto& x : t.next_state) x = normal(rng);
    t.action = static_cast<int>(i % 2);
    t.reward = std::abs(normal(rng));
    t.done = i % 10 == 0;
    t.period = i / 256;
    buffer.push(std::move(t));
  }
}

// One actor-critic update at batch size state.range(0).
void train_step(benchmark::State& state, bool parallel) {
  const sim::SimConfig world;
  const std::size_t dim = prediction::state_dim(world);
  prediction::ReplayBuffer buffer(8192);
  fill_buffer(buffer, dim, 8192);
  prediction::TrainerConfig config;
  config.batch_size = static_cast<std::size_t>(state.range(0));
  config.parallel = parallel;
  prediction::Trainer trainer(dim, config);
  for (auto _ : state) benchmark::DoNotOptimize(trainer.train_step(buffer));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TrainStepSerial(benchmark::State& state) { train_step(state, false); }
void BM_TrainStepParallel(benchmark::State& state) { train_step(state, true); }
BENCHMARK(BM_TrainStepSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainStepParallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

harness::ExperimentConfig trial_config() {
  harness::ExperimentConfig config;
  config.sim.hours = 24;
  config.method = harness::Method::kGreedy;
  config.trials = 8;
  return config;
}

void BM_TrialsSerial(benchmark::State& state) {
  const auto config = trial_config();
  for (auto _ : state) {
    double total = 0.0;
    for (std::size_t k = 0; k < config.trials; ++k) {
      auto world = config.sim;
      world.seed += k;
      harness::EpisodeOptions options;
      options.method = config.method;
      total += harness::run_episode(world, options).watch_time_per_user;
    }
    benchmark::DoNotOptimize(total);
  }
}

void BM_TrialsParallel(benchmark::State& state) {
  const auto config = trial_config();
  for (auto _ : state) benchmark::DoNotOptimize(harness::run_evaluate(config, nullptr));
}
BENCHMARK(BM_TrialsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsParallel)->Unit(benchmark::kMillisecond);

void BM_PoolRankDecide(benchmark::State& state) {
  allocation::RankIndex index(0.001);
  allocation::BudgetLedger ledger(1u << 30);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) index.record(unit(rng));
  index.rotate_period();
  for (auto _ : state) benchmark::DoNotOptimize(allocation::decide(index, ledger, unit(rng)));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PoolRankDecide);

}  // namespace

BENCHMARK_MAIN();
