#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "persuade/config.hpp"
#include "persuade/experiment.hpp"
#include "persuade/export.hpp"
#include "persuade/oracle.hpp"
#include "persuade/report.hpp"

namespace {

using namespace persuade;
using namespace persuade::harness;

constexpr int kUsageExit = 2;

void print_summary(const RunResult& run) {
  const auto& s = run.summary;
  auto line = [](const char* name, const Stat& st) {
    fmt::print("{:<16} mean={} sd={}\n", name, format_real(st.mean), format_real(st.sd));
  };
  fmt::print("env={} mode={} trials={}\n", to_string(s.env), to_string(s.mode), s.trials);
  line("receiver_return", s.receiver_return);
  line("sender_return", s.sender_return);
  line("apples", s.apples);
  line("diamonds", s.diamonds);
  if (s.mode == Mode::Contract) line("acceptance", s.acceptance);
  if (s.env == EnvKind::Gridworld) {
    fmt::print("window_coverage={}\n", format_real(run.window_coverage));
  }
}

int finish_run(const RunResult& run, const std::optional<std::filesystem::path>& out) {
  print_summary(run);
  for (const auto& w : run.warnings) fmt::print(stderr, "warning: {}\n", w);
  if (out) {
    write_artifacts(run, *out);
    fmt::print("wrote {}\n", out->string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sender/receiver persuasion and contract simulator", "persuade-sim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PERSUADE_VERSION);

  // run
  auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  bool paper_scale = false;
  run->add_option("--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Master seed (overrides the config)");
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--threads", threads, "Worker threads (0 = hardware)");
  run->add_flag("--paper-scale", paper_scale, "Use the full-scale trial and episode counts");

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Closed-form optimum reports");
  oracle_cmd->require_subcommand(1);
  auto* letter = oracle_cmd->add_subcommand("letter", "Recommendation-letter optimum");
  double p0 = 0.0;
  letter->add_option("--p0", p0, "Prior probability of a strong student")->required();
  auto* contract = oracle_cmd->add_subcommand("contract", "Optimal contract for a value matrix");
  double vrr = 0, vrs = 0, vsr = 0, vss = 0, ur0 = 0, share = 0;
  contract->add_option("--vrr", vrr, "Receiver return under pi'_R")->required();
  contract->add_option("--vrs", vrs, "Receiver return under pi'_S")->required();
  contract->add_option("--vsr", vsr, "Sender return under pi'_R")->required();
  contract->add_option("--vss", vss, "Sender return under pi'_S")->required();
  contract->add_option("--ur0", ur0, "Receiver outside option")->required();
  contract->add_option("--c", share, "Reward share for the regime report")->capture_default_str();

  // baseline
  auto* baseline = app.add_subcommand("baseline", "Receiver alone in the gridworld");
  std::string env_name;
  int visibility = 1;
  std::string fallback = "greedy";
  ExperimentConfig base_cfg;
  base_cfg.env = EnvKind::Gridworld;
  base_cfg.mode = Mode::Baseline;
  std::optional<std::string> base_out;
  baseline->add_option("--env", env_name, "Environment")
      ->required()
      ->check(CLI::IsMember({"gridworld"}));
  baseline->add_option("--visibility", visibility, "Moore radius")
      ->required()
      ->check(CLI::IsMember({1, 5}));
  baseline->add_option("--fallback", fallback, "Receiver policy")
      ->required()
      ->check(CLI::IsMember({"greedy", "bfs"}));
  baseline->add_option("--trials", base_cfg.trials)->capture_default_str();
  baseline->add_option("--train", base_cfg.train_episodes)->capture_default_str();
  baseline->add_option("--eval", base_cfg.eval_episodes)->capture_default_str();
  baseline->add_option("--seed", base_cfg.master_seed)->capture_default_str();
  baseline->add_option("--episode-len", base_cfg.grid.grid.episode_len)->capture_default_str();
  baseline->add_option("--step-cost", base_cfg.grid.grid.step_cost)->capture_default_str();
  baseline->add_option("--out", base_out, "Write artifacts here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* failing = &app;
    for (auto* sub : {run, oracle_cmd, letter, contract, baseline}) {
      if (sub->parsed()) failing = sub;
    }
    std::cerr << failing->help();
    return kUsageExit;
  }

  try {
    if (run->parsed()) {
      auto cfg = load_config(config_path);
      if (paper_scale) apply_paper_scale(cfg);
      if (seed) cfg.master_seed = *seed;
      if (out_dir) cfg.output_dir = *out_dir;
      const auto result = run_experiment(cfg, threads.value_or(-1));
      return finish_run(result, cfg.output_dir);
    }
    if (letter->parsed()) {
      fmt::print("{}", letter_report(p0));
      return 0;
    }
    if (contract->parsed()) {
      fmt::print("{}", contract_report(ValueMatrix(vrr, vrs, vsr, vss, ur0), share));
      return 0;
    }
    if (baseline->parsed()) {
      base_cfg.grid.grid.visibility = visibility;
      base_cfg.grid.fallback =
          fallback == "bfs" ? agents::FallbackKind::Bfs : agents::FallbackKind::Greedy;
      const auto result = run_experiment(base_cfg);
      std::optional<std::filesystem::path> out;
      if (base_out) out = *base_out;
      return finish_run(result, out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsageExit;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
