#include "rpaf/harness/experiment_config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <type_traits>

#include <json.hpp>

namespace rpaf::harness {
namespace {

using nlohmann::json;
using sim::ConfigError;

template <class T>
T as(const json& value, const std::string& key) {
  bool ok = false;
  if constexpr (std::is_same_v<T, std::string>) {
    ok = value.is_string();
  } else if constexpr (std::is_same_v<T, bool>) {
    ok = value.is_boolean();
  } else if constexpr (std::is_unsigned_v<T>) {
    ok = value.is_number_unsigned();
  } else {
    ok = value.is_number();
  }
  if (!ok) throw ConfigError("config key '" + key + "' has the wrong type or sign");
  return value.get<T>();
}

using Setter = std::function<void(ExperimentConfig&, const json&, const std::string&)>;

template <class T, class Field>
Setter field(Field ExperimentConfig::*outer, T Field::*inner) {
  return [outer, inner](ExperimentConfig& c, const json& v, const std::string& k) {
    (c.*outer).*inner = as<T>(v, k);
  };
}

template <class T>
Setter top(T ExperimentConfig::*member) {
  return [member](ExperimentConfig& c, const json& v, const std::string& k) { c.*member = as<T>(v, k); };
}

const std::map<std::string, Setter>& setters() {
  using Sim = sim::SimConfig;
  using Tr = prediction::TrainerConfig;
  static const std::map<std::string, Setter> table = {
      {"num_users", field(&ExperimentConfig::sim, &Sim::num_users)},
      {"slate_size", field(&ExperimentConfig::sim, &Sim::slate_size)},
      {"realtime_return", field(&ExperimentConfig::sim, &Sim::realtime_return)},
      {"hourly_budget", field(&ExperimentConfig::sim, &Sim::hourly_budget)},
      {"hours", field(&ExperimentConfig::sim, &Sim::hours)},
      {"traffic_min", field(&ExperimentConfig::sim, &Sim::traffic_min)},
      {"traffic_max", field(&ExperimentConfig::sim, &Sim::traffic_max)},
      {"staleness_floor", field(&ExperimentConfig::sim, &Sim::staleness_floor)},
      {"staleness_slope", field(&ExperimentConfig::sim, &Sim::staleness_slope)},
      {"leave_sensitivity", field(&ExperimentConfig::sim, &Sim::leave_sensitivity)},
      {"leave_bias", field(&ExperimentConfig::sim, &Sim::leave_bias)},
      {"preference_dim", field(&ExperimentConfig::sim, &Sim::preference_dim)},
      {"item_noise", field(&ExperimentConfig::sim, &Sim::item_noise)},
      {"popularity_strength", field(&ExperimentConfig::sim, &Sim::popularity_strength)},
      {"seconds_per_unit", field(&ExperimentConfig::sim, &Sim::seconds_per_unit)},
      {"catalog_seed", field(&ExperimentConfig::sim, &Sim::catalog_seed)},
      {"seed", field(&ExperimentConfig::sim, &Sim::seed)},

      {"actor_lr", field(&ExperimentConfig::trainer, &Tr::actor_lr)},
      {"critic_lr", field(&ExperimentConfig::trainer, &Tr::critic_lr)},
      {"gamma", field(&ExperimentConfig::trainer, &Tr::gamma)},
      {"tau", field(&ExperimentConfig::trainer, &Tr::tau)},
      {"train_batch_size", field(&ExperimentConfig::trainer, &Tr::batch_size)},
      {"replay_buffer_size", field(&ExperimentConfig::trainer, &Tr::buffer_size)},
      {"reward_scale", field(&ExperimentConfig::trainer, &Tr::reward_scale)},
      {"policy_delay", field(&ExperimentConfig::trainer, &Tr::policy_delay)},
      {"target_noise", field(&ExperimentConfig::trainer, &Tr::target_noise)},
      {"target_noise_clip", field(&ExperimentConfig::trainer, &Tr::target_noise_clip)},
      {"parallel", field(&ExperimentConfig::trainer, &Tr::parallel)},
      {"hidden_width",
       [](ExperimentConfig& c, const json& v, const std::string& k) {
         c.trainer.shape.hidden_width = as<std::size_t>(v, k);
       }},
      {"hidden_layers",
       [](ExperimentConfig& c, const json& v, const std::string& k) {
         c.trainer.shape.hidden_layers = as<std::size_t>(v, k);
       }},
      {"alpha",
       [](ExperimentConfig& c, const json& v, const std::string& k) {
         c.trainer.penalty.weight = as<double>(v, k);
       }},
      {"penalty",
       [](ExperimentConfig& c, const json& v, const std::string& k) {
         try {
           c.trainer.penalty.kind = prediction::parse_penalty(as<std::string>(v, k));
         } catch (const std::invalid_argument& e) {
           throw ConfigError(e.what());
         }
       }},
      {"backbone",
       [](ExperimentConfig& c, const json& v, const std::string& k) {
         try {
           c.trainer.backbone = prediction::parse_backbone(as<std::string>(v, k));
         } catch (const std::invalid_argument& e) {
           throw ConfigError(e.what());
         }
       }},
      {"method",
       [](ExperimentConfig& c, const json& v, const std::string& k) {
         try {
           c.method = parse_method(as<std::string>(v, k));
         } catch (const std::invalid_argument& e) {
           throw ConfigError(e.what());
         }
       }},
      {"optimizer",
       [](ExperimentConfig&, const json& v, const std::string& k) {
         if (as<std::string>(v, k) != "adam") throw ConfigError("only the adam optimizer is supported");
       }},
      {"action_upper_bound",
       [](ExperimentConfig&, const json& v, const std::string& k) {
         if (as<double>(v, k) != 1.0) throw ConfigError("action_upper_bound must be 1.0");
       }},
      {"trials", top(&ExperimentConfig::trials)},
      {"output_dir", top(&ExperimentConfig::output_dir)},
      {"resolution", top(&ExperimentConfig::resolution)},
      {"train_epochs", top(&ExperimentConfig::train_epochs)},
      {"train_steps_per_hour", top(&ExperimentConfig::train_steps_per_hour)},
      {"warmup_transitions", top(&ExperimentConfig::warmup_transitions)},
      {"train_seed_offset", top(&ExperimentConfig::train_seed_offset)},
  };
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  sim.validate();
  try {
    trainer.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (trials == 0) throw ConfigError("trials must be positive");
  if (!(resolution > 0.0 && resolution < 1.0)) throw ConfigError("resolution must be in (0, 1)");
  if (train_epochs == 0) throw ConfigError("train_epochs must be positive");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  if (trainer.budget != sim.hourly_budget) {
    throw ConfigError("trainer budget must equal hourly_budget");
  }
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig config;
  for (const auto& [key, value] : doc.items()) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(config, value, key);
  }
  config.trainer.budget = config.sim.hourly_budget;
  config.validate();
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

std::string dump_experiment_config(const ExperimentConfig& c) {
  json doc = {
      {"num_users", c.sim.num_users},
      {"slate_size", c.sim.slate_size},
      {"realtime_return", c.sim.realtime_return},
      {"hourly_budget", c.sim.hourly_budget},
      {"hours", c.sim.hours},
      {"traffic_min", c.sim.traffic_min},
      {"traffic_max", c.sim.traffic_max},
      {"staleness_floor", c.sim.staleness_floor},
      {"staleness_slope", c.sim.staleness_slope},
      {"leave_sensitivity", c.sim.leave_sensitivity},
      {"leave_bias", c.sim.leave_bias},
      {"preference_dim", c.sim.preference_dim},
      {"item_noise", c.sim.item_noise},
      {"popularity_strength", c.sim.popularity_strength},
      {"seconds_per_unit", c.sim.seconds_per_unit},
      {"catalog_seed", c.sim.catalog_seed},
      {"seed", c.sim.seed},
      {"actor_lr", c.trainer.actor_lr},
      {"critic_lr", c.trainer.critic_lr},
      {"gamma", c.trainer.gamma},
      {"tau", c.trainer.tau},
      {"train_batch_size", c.trainer.batch_size},
      {"replay_buffer_size", c.trainer.buffer_size},
      {"reward_scale", c.trainer.reward_scale},
      {"policy_delay", c.trainer.policy_delay},
      {"target_noise", c.trainer.target_noise},
      {"target_noise_clip", c.trainer.target_noise_clip},
      {"parallel", c.trainer.parallel},
      {"hidden_width", c.trainer.shape.hidden_width},
      {"hidden_layers", c.trainer.shape.hidden_layers},
      {"alpha", c.trainer.penalty.weight},
      {"penalty", prediction::to_string(c.trainer.penalty.kind)},
      {"backbone", prediction::to_string(c.trainer.backbone)},
      {"method", to_string(c.method)},
      {"optimizer", "adam"},
      {"action_upper_bound", 1.0},
      {"trials", c.trials},
      {"output_dir", c.output_dir},
      {"resolution", c.resolution},
      {"train_epochs", c.train_epochs},
      {"train_steps_per_hour", c.train_steps_per_hour},
      {"warmup_transitions", c.warmup_transitions},
      {"train_seed_offset", c.train_seed_offset},
  };
  return doc.dump(2) + "\n";
}

}  // namespace rpaf::harness
