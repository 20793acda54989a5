#include "persuade/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace persuade::harness {

std::uint64_t trial_seed(std::uint64_t master_seed, std::int64_t trial) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(trial));
}

Stat summarize(const std::vector<double>& values) {
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  for (double x : values) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  Stat s;
  s.mean = mean;
  s.sd = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
  return s;
}

std::vector<const EpisodeRecord*> summary_episodes(const TrialResult& trial) {
  std::vector<const EpisodeRecord*> eval;
  std::vector<const EpisodeRecord*> all;
  for (const auto& rec : trial.episodes) {
    all.push_back(&rec);
    if (rec.eval) eval.push_back(&rec);
  }
  return eval.empty() ? all : eval;
}

AggregateRow aggregate(const ExperimentConfig& cfg, const std::vector<TrialResult>& trials) {
  AggregateRow row;
  row.env = cfg.env;
  row.mode = cfg.mode;
  row.trials = static_cast<int>(trials.size());
  if (cfg.env == EnvKind::Gridworld) {
    row.theta = cfg.grid.grid.theta_degrees;
    row.visibility = cfg.grid.grid.visibility;
    row.fallback = cfg.grid.fallback;
  } else {
    row.p0 = cfg.letter.p0;
  }
  // Letter figures are reported per interaction.
  const double scale =
      cfg.env == EnvKind::Letter ? 1.0 / static_cast<double>(cfg.letter.episode_len) : 1.0;

  std::vector<double> receiver, sender, apples, diamonds, acceptance;
  for (const auto& trial : trials) {
    const auto episodes = summary_episodes(trial);
    double r = 0.0, s = 0.0, a = 0.0, d = 0.0, acc = 0.0;
    for (const auto* rec : episodes) {
      r += rec->receiver_return;
      s += rec->sender_return;
      a += static_cast<double>(rec->apples);
      d += static_cast<double>(rec->diamonds);
      acc += rec->accepted ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(episodes.size());
    receiver.push_back(r / n * scale);
    sender.push_back(s / n * scale);
    apples.push_back(a / n);
    diamonds.push_back(d / n);
    acceptance.push_back(acc / n);
  }
  row.receiver_return = summarize(receiver);
  row.sender_return = summarize(sender);
  row.apples = summarize(apples);
  row.diamonds = summarize(diamonds);
  row.acceptance = summarize(acceptance);
  return row;
}

RunResult run_experiment(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  RunResult result;
  result.config = cfg;
  result.trials.resize(static_cast<std::size_t>(cfg.trials));

  int workers = threads >= 0 ? threads : cfg.threads;
  if (workers == 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::max(1, std::min(workers, cfg.trials));

  auto run_one = [&cfg](std::int64_t trial) {
    return cfg.env == EnvKind::Letter ? run_letter_trial(cfg, trial) : run_grid_trial(cfg, trial);
  };

  if (workers == 1) {
    for (int t = 0; t < cfg.trials; ++t) result.trials[static_cast<std::size_t>(t)] = run_one(t);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int t = next++; t < cfg.trials; t = next++) {
          try {
            result.trials[static_cast<std::size_t>(t)] = run_one(t);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  result.summary = aggregate(cfg, result.trials);
  if (cfg.env == EnvKind::Gridworld) {
    result.window_coverage = envs::average_window_coverage(cfg.grid.grid);
  }
  if (cfg.mode != Mode::Contract) {
    result.warnings.push_back("acceptance table is empty: not a contract-mode run");
  }
  return result;
}

}  // namespace persuade::harness
