#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "persuade/agents.hpp"
#include "persuade/gridworld.hpp"
#include "persuade/letter.hpp"

namespace persuade::harness {

/// Invalid or unparseable experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EnvKind { Letter, Gridworld };
enum class Mode { Baseline, Signalling, Contract };

std::string to_string(EnvKind env);
std::string to_string(Mode mode);
std::string to_string(agents::FallbackKind kind);

struct LetterSettings {
  double p0 = 1.0 / 3.0;
  int episode_len = 50;
  std::int64_t interactions = 40000;
  double p2_step = 0.05;
  double contract_p2_step = 0.2;
  double c_step = 0.2;
  double sender_discount = 0.95;
  double sender_ucb = 0.0003;
  double receiver_discount = 1.0;
  double receiver_ucb = 0.1;
};

struct GridSettings {
  envs::GridConfig grid;
  agents::FallbackKind fallback = agents::FallbackKind::Greedy;
  double p_step = 0.2;
  double c_step = 0.2;
};

/// Discounted epsilon-greedy Sender (gridworld).
struct SenderSettings {
  double discount = 0.9;
  double eps_start = 1.0;
  double eps_end = 0.05;
  double decay_fraction = 0.75;
};

/// Gridworld Receiver: accept/reject and follow/override Q-tables.
struct ReceiverSettings {
  double accept_learning_rate = 0.1;
  double accept_discount = 0.9;
  double accept_exploration = 0.05;
  double follow_learning_rate = 0.01;
  double follow_discount = 0.9;
  double follow_exploration = 0.05;
};

struct ExperimentConfig {
  EnvKind env = EnvKind::Gridworld;
  Mode mode = Mode::Signalling;
  int trials = 10;
  std::int64_t train_episodes = 2000;
  std::int64_t eval_episodes = 100;
  std::uint64_t master_seed = 1;
  /// Worker threads; 0 picks the hardware concurrency.
  int threads = 0;
  std::filesystem::path output_dir = "out";

  LetterSettings letter;
  GridSettings grid;
  SenderSettings sender;
  ReceiverSettings receiver;

  /// Letter episodes come from interactions / episode_len.
  std::int64_t training_episodes() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses the INI-style config text (sections experiment, letter, gridworld,
/// sender, receiver). Unknown sections or keys are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Letter: 200k interactions over 100 trials; gridworld: 2000/100 episodes
/// over 10 trials.
void apply_paper_scale(ExperimentConfig& cfg);

}  // namespace persuade::harness
