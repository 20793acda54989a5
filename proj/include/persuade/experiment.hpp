#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "persuade/config.hpp"
#include "persuade/core.hpp"

namespace persuade::harness {

struct TrialResult {
  std::int64_t trial_id = 0;
  std::uint64_t seed = 0;
  std::vector<EpisodeRecord> episodes;
};

/// Mean and sample standard deviation of per-trial means.
struct Stat {
  double mean = 0.0;
  double sd = 0.0;
};

/// Streaming (Welford) mean / sample SD.
Stat summarize(const std::vector<double>& values);

/// Summary of one run. Gridworld figures are per-episode over the evaluation
/// episodes; letter figures are per interaction over the whole run.
struct AggregateRow {
  EnvKind env = EnvKind::Gridworld;
  Mode mode = Mode::Signalling;
  double theta = 0.0;
  int visibility = 0;
  agents::FallbackKind fallback = agents::FallbackKind::Greedy;
  double p0 = 0.0;
  int trials = 0;
  Stat receiver_return;
  Stat sender_return;
  Stat apples;
  Stat diamonds;
  /// Only meaningful in contract mode.
  Stat acceptance;
};

struct RunResult {
  ExperimentConfig config;
  std::vector<TrialResult> trials;
  AggregateRow summary;
  /// Exact average window coverage (gridworld only).
  double window_coverage = 0.0;
  std::vector<std::string> warnings;
};

/// Per-trial seed: stable hash of (master_seed, trial index).
std::uint64_t trial_seed(std::uint64_t master_seed, std::int64_t trial);

TrialResult run_letter_trial(const ExperimentConfig& cfg, std::int64_t trial);
TrialResult run_grid_trial(const ExperimentConfig& cfg, std::int64_t trial);

/// Runs every trial on a bounded worker pool (`threads` overrides the
/// config; 1 = serial). Output does not depend on the thread count.
RunResult run_experiment(const ExperimentConfig& cfg, int threads = -1);

/// Episodes a summary is computed over: evaluation episodes when there are
/// any, otherwise all of them.
std::vector<const EpisodeRecord*> summary_episodes(const TrialResult& trial);

AggregateRow aggregate(const ExperimentConfig& cfg, const std::vector<TrialResult>& trials);

}  // namespace persuade::harness
