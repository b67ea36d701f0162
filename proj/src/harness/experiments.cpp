#include "rpaf/harness/experiments.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "rpaf/nn/checkpoint.hpp"
#include "rpaf/parallel/batch_reduce.hpp"
#include "rpaf/prediction/replay_buffer.hpp"
#include "rpaf/prediction/state_encoding.hpp"

namespace rpaf::harness {

TrainingResult run_collect_train(const ExperimentConfig& config,
                                 const std::filesystem::path& out_dir,
                                 const std::vector<nn::DenseNet>& init) {
  config.validate();
  const std::size_t dim = prediction::state_dim(config.sim);
  prediction::Trainer trainer(dim, config.trainer);
  if (!init.empty()) trainer.import_networks(init);
  prediction::ReplayBuffer buffer(config.trainer.buffer_size);

  TrainingResult result;
  for (std::size_t epoch = 0; epoch < config.train_epochs; ++epoch) {
    sim::SimConfig world = config.sim;
    world.seed = config.train_seed_offset + config.sim.seed + epoch;

    TrainingRecord record;
    double behavior_sum = 0.0;

    EpisodeOptions options;
    options.method = Method::kRpafNoPool;
    options.explore = true;
    options.resolution = config.resolution;
    options.actor = &trainer.actor().online;
    options.period_offset = epoch * config.sim.hours;
    options.on_transition = [&](prediction::Transition&& t) {
      behavior_sum += trainer.act(t.state);
      record.requests += 1;
      buffer.push(std::move(t));
    };
    options.on_hour_end = [&](std::size_t hour) {
      record.epoch = epoch;
      record.hour = hour;
      record.behavior_a_tilde = record.requests > 0 ? behavior_sum / static_cast<double>(record.requests)
                                                    : std::numeric_limits<double>::quiet_NaN();
      if (buffer.size() >= config.warmup_transitions) {
        for (std::size_t k = 0; k < config.train_steps_per_hour; ++k) {
          const auto d = trainer.train_step(buffer);
          record.train_steps += 1;
          record.critic_loss += d.critic_loss;
          record.mean_td_error += d.mean_td_error;
          record.mean_m_t += d.mean_m_t;
          record.mean_a_tilde += d.mean_a_tilde;
          record.mean_penalty += d.mean_penalty;
          record.actor_loss += d.actor_loss;
        }
      }
      if (record.train_steps > 0) {
        const double n = static_cast<double>(record.train_steps);
        record.critic_loss /= n;
        record.actor_loss /= n;
        record.mean_a_tilde /= n;
        record.mean_penalty /= n;
        record.mean_td_error /= n;
        record.mean_m_t /= n;
      }
      record.buffer_size = buffer.size();
      result.records.push_back(record);
      record = TrainingRecord{};
      behavior_sum = 0.0;
    };
    run_episode(world, options);
  }
  result.networks = trainer.export_networks();

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_training_csv(out_dir / "training.csv", result.records);
    nn::save_checkpoint(result.networks, out_dir / "checkpoint.bin");
  }
  return result;
}

void write_training_csv(const std::filesystem::path& path, const std::vector<TrainingRecord>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ReportError("cannot write " + path.string());
  out << "epoch,hour,requests,buffer_size,train_steps,critic_loss,actor_loss,mean_atilde,"
         "mean_penalty,mean_td_error,mean_m_t,behavior_atilde\n";
  for (const auto& r : rows) {
    out << r.epoch << ',' << r.hour << ',' << r.requests << ',' << r.buffer_size << ','
        << r.train_steps << ',' << format_double(r.critic_loss) << ',' << format_double(r.actor_loss)
        << ',' << format_double(r.mean_a_tilde) << ',' << format_double(r.mean_penalty) << ','
        << format_double(r.mean_td_error) << ',' << format_double(r.mean_m_t) << ','
        << format_double(r.behavior_a_tilde) << '\n';
  }
  if (!out) throw ReportError("write failed for " + path.string());
}

EvaluationResult run_evaluate(const ExperimentConfig& config, const nn::DenseNet* actor) {
  config.validate();
  EvaluationResult result;
  result.trials.resize(config.trials);
  std::vector<std::uint64_t> seeds(config.trials);
  for (std::size_t k = 0; k < config.trials; ++k) seeds[k] = config.sim.seed + k;

  EpisodeOptions options;
  options.method = config.method;
  options.resolution = config.resolution;
  options.actor = actor;
  parallel::parallel_for(config.trials, [&](std::size_t k) {
    sim::SimConfig world = config.sim;
    world.seed = seeds[k];
    result.trials[k] = run_episode(world, options).hours;
  });
  result.summary = summarize(to_string(config.method), config.sim.num_users, seeds, result.trials);
  return result;
}

EvaluationResult run_evaluate(const ExperimentConfig& config, const std::filesystem::path& checkpoint) {
  if (!uses_actor(config.method)) return run_evaluate(config, nullptr);
  const auto nets = nn::load_checkpoint(checkpoint);
  if (nets.empty()) throw std::invalid_argument("checkpoint holds no networks");
  const auto& actor = nets.front();
  if (actor.input_dim() != prediction::state_dim(config.sim) || actor.output_dim() != 1) {
    throw std::invalid_argument("checkpoint actor does not match the configured state encoding");
  }
  return run_evaluate(config, &actor);
}

}  // namespace rpaf::harness
