#include "persuade/export.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <fmt/format.h>
#include <json.hpp>

namespace persuade::harness {

namespace fs = std::filesystem;

int decile_of(std::int64_t episode_id, std::int64_t training_episodes) {
  return static_cast<int>(std::min<std::int64_t>(
      episode_id * kDeciles / std::max<std::int64_t>(training_episodes, 1), kDeciles - 1));
}

std::vector<ArmCoordinates> arm_coordinates(const ExperimentConfig& cfg) {
  std::vector<ArmCoordinates> coords;
  const bool contract = cfg.mode == Mode::Contract;
  if (cfg.env == EnvKind::Letter) {
    const auto space = agents::letter_strategy_space(
        contract, contract ? cfg.letter.contract_p2_step : cfg.letter.p2_step, cfg.letter.c_step);
    for (const auto& arm : space.arms()) coords.push_back({arm.policy.p1(), arm.policy.p2(), arm.c});
  } else if (cfg.mode != Mode::Baseline) {
    const auto space = agents::grid_strategy_space(contract, cfg.grid.p_step, cfg.grid.c_step);
    for (const auto& arm : space.arms()) coords.push_back({arm.p(), std::nullopt, arm.c()});
  }
  return coords;
}

std::vector<ArmFrequencyRow> arm_frequencies(const RunResult& run) {
  const auto coords = arm_coordinates(run.config);
  if (coords.empty()) return {};
  const auto n_arms = coords.size();
  std::vector<std::int64_t> counts(kDeciles * n_arms, 0);
  std::vector<std::int64_t> totals(kDeciles, 0);
  const auto training = run.config.training_episodes();
  for (const auto& trial : run.trials) {
    for (const auto& rec : trial.episodes) {
      if (rec.eval || rec.arm < 0) continue;
      const int d = decile_of(rec.episode_id, training);
      ++counts[static_cast<std::size_t>(d) * n_arms + static_cast<std::size_t>(rec.arm)];
      ++totals[static_cast<std::size_t>(d)];
    }
  }
  std::vector<ArmFrequencyRow> rows;
  rows.reserve(counts.size());
  for (int d = 0; d < kDeciles; ++d) {
    for (std::size_t a = 0; a < n_arms; ++a) {
      ArmFrequencyRow row;
      row.decile = d;
      row.arm = static_cast<std::int64_t>(a);
      row.coords = coords[a];
      row.count = counts[static_cast<std::size_t>(d) * n_arms + a];
      const auto total = totals[static_cast<std::size_t>(d)];
      row.percent = total > 0 ? 100.0 * static_cast<double>(row.count) / static_cast<double>(total)
                              : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<AcceptanceRow> acceptance_rates(const RunResult& run) {
  if (run.config.mode != Mode::Contract) return {};
  const auto coords = arm_coordinates(run.config);
  const auto n_arms = coords.size();
  std::vector<std::int64_t> proposed(kDeciles * n_arms, 0);
  std::vector<std::int64_t> accepted(kDeciles * n_arms, 0);
  const auto training = run.config.training_episodes();
  for (const auto& trial : run.trials) {
    for (const auto& rec : trial.episodes) {
      if (rec.eval || rec.arm < 0) continue;
      const auto i = static_cast<std::size_t>(decile_of(rec.episode_id, training)) * n_arms +
                     static_cast<std::size_t>(rec.arm);
      ++proposed[i];
      accepted[i] += rec.accepted;
    }
  }
  std::vector<AcceptanceRow> rows;
  for (int d = 0; d < kDeciles; ++d) {
    AcceptanceRow overall;
    overall.decile = d;
    std::vector<AcceptanceRow> per_arm;
    for (std::size_t a = 0; a < n_arms; ++a) {
      const auto i = static_cast<std::size_t>(d) * n_arms + a;
      AcceptanceRow row;
      row.decile = d;
      row.arm = static_cast<std::int64_t>(a);
      row.coords = coords[a];
      row.proposed = proposed[i];
      row.accepted = accepted[i];
      if (row.proposed > 0) {
        row.rate = static_cast<double>(row.accepted) / static_cast<double>(row.proposed);
      }
      overall.proposed += row.proposed;
      overall.accepted += row.accepted;
      per_arm.push_back(row);
    }
    if (overall.proposed > 0) {
      overall.rate = static_cast<double>(overall.accepted) / static_cast<double>(overall.proposed);
    }
    rows.push_back(overall);
    rows.insert(rows.end(), per_arm.begin(), per_arm.end());
  }
  return rows;
}

std::vector<std::pair<double, double>> p_marginal(const std::vector<ArmFrequencyRow>& rows,
                                                  int decile) {
  std::map<double, double> mass;
  for (const auto& row : rows) {
    if (row.decile == decile) mass[row.coords.p] += row.percent;
  }
  return {mass.begin(), mass.end()};
}

double modal_p(const std::vector<ArmFrequencyRow>& rows, int decile) {
  const auto marginal = p_marginal(rows, decile);
  if (marginal.empty()) throw DomainError("no arms in the requested decile");
  auto best = marginal.front();
  for (const auto& entry : marginal) {
    if (entry.second > best.second) best = entry;
  }
  return best.first;
}

std::string format_real(double x) { return fmt::format("{:.6g}", x); }

namespace {

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string opt(const std::optional<double>& x) { return x ? format_real(*x) : ""; }

}  // namespace

void write_episodes_csv(const RunResult& run, const fs::path& path) {
  auto out = open_for_write(path);
  out << "trial_id,episode_id,phase,arm,p,p2,c,accepted,receiver_return,sender_return,"
         "apples,diamonds,follow_rate\n";
  for (const auto& trial : run.trials) {
    for (const auto& r : trial.episodes) {
      out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.trial_id, r.episode_id,
                         r.eval ? "eval" : "train", r.arm, format_real(r.p), opt(r.p2),
                         format_real(r.c), r.accepted ? 1 : 0, format_real(r.receiver_return),
                         format_real(r.sender_return), r.apples, r.diamonds, opt(r.follow_rate));
    }
  }
  finish(out, path);
}

void write_arms_csv(const std::vector<ArmFrequencyRow>& rows, const fs::path& path) {
  auto out = open_for_write(path);
  out << "decile,arm,p,p2,c,count,percent\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{}\n", r.decile, r.arm, format_real(r.coords.p),
                       opt(r.coords.p2), format_real(r.coords.c), r.count, format_real(r.percent));
  }
  finish(out, path);
}

void write_acceptance_csv(const std::vector<AcceptanceRow>& rows, const fs::path& path) {
  auto out = open_for_write(path);
  out << "decile,arm,p,p2,c,proposed,accepted,rate\n";
  for (const auto& r : rows) {
    if (r.arm) {
      out << fmt::format("{},{},{},{},{},{},{},{}\n", r.decile, *r.arm, format_real(r.coords.p),
                         opt(r.coords.p2), format_real(r.coords.c), r.proposed, r.accepted,
                         opt(r.rate));
    } else {
      out << fmt::format("{},all,,,,{},{},{}\n", r.decile, r.proposed, r.accepted, opt(r.rate));
    }
  }
  finish(out, path);
}

void write_summary_csv(const AggregateRow& row, const fs::path& path) {
  auto out = open_for_write(path);
  out << "env,mode,theta,visibility,fallback,p0,trials,receiver_mean,receiver_sd,sender_mean,"
         "sender_sd,apples_mean,apples_sd,diamonds_mean,diamonds_sd,acceptance_mean,"
         "acceptance_sd\n";
  const bool grid = row.env == EnvKind::Gridworld;
  out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(row.env),
                     to_string(row.mode), grid ? format_real(row.theta) : "",
                     grid ? std::to_string(row.visibility) : "",
                     grid ? to_string(row.fallback) : "", grid ? "" : format_real(row.p0),
                     row.trials, format_real(row.receiver_return.mean),
                     format_real(row.receiver_return.sd), format_real(row.sender_return.mean),
                     format_real(row.sender_return.sd), format_real(row.apples.mean),
                     format_real(row.apples.sd), format_real(row.diamonds.mean),
                     format_real(row.diamonds.sd), format_real(row.acceptance.mean),
                     format_real(row.acceptance.sd));
  finish(out, path);
}

namespace {

nlohmann::ordered_json config_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["experiment"] = {{"env", to_string(cfg.env)},
                     {"mode", to_string(cfg.mode)},
                     {"trials", cfg.trials},
                     {"train_episodes", cfg.training_episodes()},
                     {"eval_episodes", cfg.eval_episodes},
                     {"seed", cfg.master_seed}};
  if (cfg.env == EnvKind::Letter) {
    const auto& l = cfg.letter;
    j["letter"] = {{"p0", l.p0},
                   {"episode_len", l.episode_len},
                   {"interactions", l.interactions},
                   {"p2_step", l.p2_step},
                   {"contract_p2_step", l.contract_p2_step},
                   {"c_step", l.c_step},
                   {"sender_discount", l.sender_discount},
                   {"sender_ucb", l.sender_ucb},
                   {"receiver_discount", l.receiver_discount},
                   {"receiver_ucb", l.receiver_ucb}};
  } else {
    const auto& g = cfg.grid;
    j["gridworld"] = {{"width", g.grid.width},
                      {"height", g.grid.height},
                      {"visibility", g.grid.visibility},
                      {"theta", g.grid.theta_degrees},
                      {"episode_len", g.grid.episode_len},
                      {"step_cost", g.grid.step_cost},
                      {"fallback", to_string(g.fallback)},
                      {"p_step", g.p_step},
                      {"c_step", g.c_step}};
    j["sender"] = {{"discount", cfg.sender.discount},
                   {"eps_start", cfg.sender.eps_start},
                   {"eps_end", cfg.sender.eps_end},
                   {"decay_fraction", cfg.sender.decay_fraction}};
    const auto& r = cfg.receiver;
    j["receiver"] = {{"accept_learning_rate", r.accept_learning_rate},
                     {"accept_discount", r.accept_discount},
                     {"accept_exploration", r.accept_exploration},
                     {"follow_learning_rate", r.follow_learning_rate},
                     {"follow_discount", r.follow_discount},
                     {"follow_exploration", r.follow_exploration}};
  }
  return j;
}

}  // namespace

void write_manifest(const RunResult& run, const fs::path& path) {
  nlohmann::ordered_json j;
  j["code_version"] = PERSUADE_VERSION;
  j["master_seed"] = run.config.master_seed;
  j["config"] = config_json(run.config);
  auto seeds = nlohmann::ordered_json::array();
  for (const auto& t : run.trials) seeds.push_back(t.seed);
  j["trial_seeds"] = seeds;
  if (run.config.env == EnvKind::Gridworld) {
    j["eval_exploration"] = 0.0;
    j["window_coverage"] = run.window_coverage;
  }
  j["warnings"] = run.warnings;
  auto out = open_for_write(path);
  out << j.dump(2) << "\n";
  finish(out, path);
}

std::vector<fs::path> write_artifacts(const RunResult& run, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const std::vector<fs::path> paths = {dir / "episodes.csv", dir / "arms.csv",
                                       dir / "acceptance.csv", dir / "summary.csv",
                                       dir / "manifest.json"};
  write_episodes_csv(run, paths[0]);
  write_arms_csv(arm_frequencies(run), paths[1]);
  write_acceptance_csv(acceptance_rates(run), paths[2]);
  write_summary_csv(run.summary, paths[3]);
  write_manifest(run, paths[4]);
  return paths;
}

}  // namespace persuade::harness
