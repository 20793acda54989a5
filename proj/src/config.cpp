#include "persuade/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace persuade::harness {

std::string to_string(EnvKind env) {
  return env == EnvKind::Letter ? "letter" : "gridworld";
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Baseline: return "baseline";
    case Mode::Signalling: return "signalling";
    case Mode::Contract: return "contract";
  }
  return "?";
}

std::string to_string(agents::FallbackKind kind) {
  return kind == agents::FallbackKind::Greedy ? "greedy" : "bfs";
}

std::int64_t ExperimentConfig::training_episodes() const {
  if (env == EnvKind::Letter) return letter.interactions / letter.episode_len;
  return train_episodes;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid config: " + what);
}

bool unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void ExperimentConfig::validate() const {
  require(trials > 0, "experiment.trials must be positive");
  require(eval_episodes >= 0, "experiment.eval_episodes must be non-negative");
  require(threads >= 0, "experiment.threads must be non-negative");
  if (env == EnvKind::Letter) {
    require(mode != Mode::Baseline, "letter runs support signalling and contract modes only");
    try {
      envs::LetterConfig{letter.p0, letter.episode_len, mode == Mode::Contract}.validate();
      agents::letter_strategy_space(mode == Mode::Contract,
                                    mode == Mode::Contract ? letter.contract_p2_step
                                                           : letter.p2_step,
                                    letter.c_step);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("invalid config: letter: ") + e.what());
    }
    require(letter.interactions >= letter.episode_len,
            "letter.interactions must cover at least one episode");
    require(letter.sender_discount > 0.0 && letter.sender_discount <= 1.0,
            "letter.sender_discount must lie in (0, 1]");
    require(letter.receiver_discount > 0.0 && letter.receiver_discount <= 1.0,
            "letter.receiver_discount must lie in (0, 1]");
    require(letter.sender_ucb >= 0.0 && letter.receiver_ucb >= 0.0,
            "letter UCB coefficients must be non-negative");
    return;
  }
  require(train_episodes > 0, "experiment.train_episodes must be positive");
  try {
    grid.grid.validate();
    agents::grid_strategy_space(mode == Mode::Contract, grid.p_step, grid.c_step);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid config: gridworld: ") + e.what());
  }
  require(sender.discount > 0.0 && sender.discount <= 1.0, "sender.discount must lie in (0, 1]");
  require(unit(sender.eps_start) && unit(sender.eps_end), "sender epsilons must lie in [0, 1]");
  require(sender.eps_end <= sender.eps_start, "sender.eps_end must not exceed eps_start");
  require(sender.decay_fraction > 0.0 && sender.decay_fraction <= 1.0,
          "sender.decay_fraction must lie in (0, 1]");
  require(receiver.accept_learning_rate > 0.0 && receiver.accept_learning_rate <= 1.0 &&
              receiver.follow_learning_rate > 0.0 && receiver.follow_learning_rate <= 1.0,
          "receiver learning rates must lie in (0, 1]");
  require(receiver.accept_discount >= 0.0 && receiver.accept_discount < 1.0 &&
              receiver.follow_discount >= 0.0 && receiver.follow_discount < 1.0,
          "receiver discounts must lie in [0, 1)");
  require(unit(receiver.accept_exploration) && unit(receiver.follow_exploration),
          "receiver exploration rates must lie in [0, 1]");
}

namespace {

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

template <typename T>
T convert(const std::string& key, const std::string& raw) {
  try {
    return boost::lexical_cast<T>(raw);
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError("invalid config: cannot parse " + key + " = '" + raw + "'");
  }
}

template <typename T>
Setter field(T ExperimentConfig::*member) {
  return [member](ExperimentConfig& cfg, const std::string& raw) {
    cfg.*member = convert<T>("value", raw);
  };
}

template <typename T>
Setter assign(std::function<T&(ExperimentConfig&)> slot) {
  return [slot](ExperimentConfig& cfg, const std::string& raw) {
    slot(cfg) = convert<T>("value", raw);
  };
}

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"experiment",
       {
           {"env",
            [](ExperimentConfig& c, const std::string& v) {
              if (v == "letter") c.env = EnvKind::Letter;
              else if (v == "gridworld") c.env = EnvKind::Gridworld;
              else throw ConfigError("invalid config: unknown env '" + v + "'");
            }},
           {"mode",
            [](ExperimentConfig& c, const std::string& v) {
              if (v == "baseline") c.mode = Mode::Baseline;
              else if (v == "signalling") c.mode = Mode::Signalling;
              else if (v == "contract") c.mode = Mode::Contract;
              else throw ConfigError("invalid config: unknown mode '" + v + "'");
            }},
           {"trials", field(&ExperimentConfig::trials)},
           {"train_episodes", field(&ExperimentConfig::train_episodes)},
           {"eval_episodes", field(&ExperimentConfig::eval_episodes)},
           {"seed", field(&ExperimentConfig::master_seed)},
           {"threads", field(&ExperimentConfig::threads)},
           {"output_dir",
            [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; }},
       }},
      {"letter",
       {
           {"p0", assign<double>([](ExperimentConfig& c) -> double& { return c.letter.p0; })},
           {"episode_len",
            assign<int>([](ExperimentConfig& c) -> int& { return c.letter.episode_len; })},
           {"interactions", assign<std::int64_t>([](ExperimentConfig& c) -> std::int64_t& {
              return c.letter.interactions;
            })},
           {"p2_step",
            assign<double>([](ExperimentConfig& c) -> double& { return c.letter.p2_step; })},
           {"contract_p2_step", assign<double>([](ExperimentConfig& c) -> double& {
              return c.letter.contract_p2_step;
            })},
           {"c_step",
            assign<double>([](ExperimentConfig& c) -> double& { return c.letter.c_step; })},
           {"sender_discount", assign<double>([](ExperimentConfig& c) -> double& {
              return c.letter.sender_discount;
            })},
           {"sender_ucb",
            assign<double>([](ExperimentConfig& c) -> double& { return c.letter.sender_ucb; })},
           {"receiver_discount", assign<double>([](ExperimentConfig& c) -> double& {
              return c.letter.receiver_discount;
            })},
           {"receiver_ucb", assign<double>([](ExperimentConfig& c) -> double& {
              return c.letter.receiver_ucb;
            })},
       }},
      {"gridworld",
       {
           {"width", assign<int>([](ExperimentConfig& c) -> int& { return c.grid.grid.width; })},
           {"height",
            assign<int>([](ExperimentConfig& c) -> int& { return c.grid.grid.height; })},
           {"visibility",
            assign<int>([](ExperimentConfig& c) -> int& { return c.grid.grid.visibility; })},
           {"theta", assign<double>([](ExperimentConfig& c) -> double& {
              return c.grid.grid.theta_degrees;
            })},
           {"episode_len",
            assign<int>([](ExperimentConfig& c) -> int& { return c.grid.grid.episode_len; })},
           {"step_cost", assign<double>([](ExperimentConfig& c) -> double& {
              return c.grid.grid.step_cost;
            })},
           {"fallback",
            [](ExperimentConfig& c, const std::string& v) {
              if (v == "greedy") c.grid.fallback = agents::FallbackKind::Greedy;
              else if (v == "bfs") c.grid.fallback = agents::FallbackKind::Bfs;
              else throw ConfigError("invalid config: unknown fallback '" + v + "'");
            }},
           {"p_step", assign<double>([](ExperimentConfig& c) -> double& { return c.grid.p_step; })},
           {"c_step", assign<double>([](ExperimentConfig& c) -> double& { return c.grid.c_step; })},
       }},
      {"sender",
       {
           {"discount",
            assign<double>([](ExperimentConfig& c) -> double& { return c.sender.discount; })},
           {"eps_start",
            assign<double>([](ExperimentConfig& c) -> double& { return c.sender.eps_start; })},
           {"eps_end",
            assign<double>([](ExperimentConfig& c) -> double& { return c.sender.eps_end; })},
           {"decay_fraction", assign<double>([](ExperimentConfig& c) -> double& {
              return c.sender.decay_fraction;
            })},
       }},
      {"receiver",
       {
           {"accept_learning_rate", assign<double>([](ExperimentConfig& c) -> double& {
              return c.receiver.accept_learning_rate;
            })},
           {"accept_discount", assign<double>([](ExperimentConfig& c) -> double& {
              return c.receiver.accept_discount;
            })},
           {"accept_exploration", assign<double>([](ExperimentConfig& c) -> double& {
              return c.receiver.accept_exploration;
            })},
           {"follow_learning_rate", assign<double>([](ExperimentConfig& c) -> double& {
              return c.receiver.follow_learning_rate;
            })},
           {"follow_discount", assign<double>([](ExperimentConfig& c) -> double& {
              return c.receiver.follow_discount;
            })},
           {"follow_exploration", assign<double>([](ExperimentConfig& c) -> double& {
              return c.receiver.follow_exploration;
            })},
       }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  ExperimentConfig cfg;
  const auto& table = setters();
  for (const auto& [section, keys] : tree) {
    const auto sec = table.find(section);
    if (sec == table.end()) throw ConfigError("invalid config: unknown section [" + section + "]");
    if (keys.empty() && !keys.data().empty()) {
      throw ConfigError("invalid config: key '" + section + "' outside any section");
    }
    for (const auto& [key, node] : keys) {
      const auto setter = sec->second.find(key);
      if (setter == sec->second.end()) {
        throw ConfigError("invalid config: unknown key " + section + "." + key);
      }
      try {
        setter->second(cfg, node.data());
      } catch (const ConfigError& e) {
        throw ConfigError(std::string(e.what()) + " (" + section + "." + key + ")");
      }
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void apply_paper_scale(ExperimentConfig& cfg) {
  if (cfg.env == EnvKind::Letter) {
    cfg.letter.interactions = 200000;
    cfg.trials = 100;
  } else {
    cfg.train_episodes = 2000;
    cfg.eval_episodes = 100;
    cfg.trials = 10;
  }
}

}  // namespace persuade::harness
