#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "persuade/config.hpp"
#include "persuade/experiment.hpp"
#include "persuade/export.hpp"
#include "persuade/rng.hpp"

namespace persuade::harness {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("persuade_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ExperimentConfig small_grid(Mode mode, double theta = 45.0) {
  ExperimentConfig cfg;
  cfg.env = EnvKind::Gridworld;
  cfg.mode = mode;
  cfg.trials = 3;
  cfg.train_episodes = 40;
  cfg.eval_episodes = 5;
  cfg.threads = 1;
  cfg.grid.grid.theta_degrees = theta;
  cfg.grid.grid.episode_len = 60;
  return cfg;
}

ExperimentConfig small_letter(Mode mode) {
  ExperimentConfig cfg;
  cfg.env = EnvKind::Letter;
  cfg.mode = mode;
  cfg.trials = 3;
  cfg.eval_episodes = 0;
  cfg.letter.interactions = 5000;
  cfg.threads = 1;
  return cfg;
}

bool same_records(const EpisodeRecord& a, const EpisodeRecord& b) {
  return a.trial_id == b.trial_id && a.episode_id == b.episode_id && a.eval == b.eval &&
         a.arm == b.arm && a.p == b.p && a.p2 == b.p2 && a.c == b.c && a.accepted == b.accepted &&
         a.receiver_return == b.receiver_return && a.sender_return == b.sender_return &&
         a.apples == b.apples && a.diamonds == b.diamonds && a.follow_rate == b.follow_rate;
}

void expect_same_runs(const RunResult& a, const RunResult& b) {
  ASSERT_EQ(a.trials.size(), b.trials.size());
  for (std::size_t t = 0; t < a.trials.size(); ++t) {
    EXPECT_EQ(a.trials[t].seed, b.trials[t].seed);
    ASSERT_EQ(a.trials[t].episodes.size(), b.trials[t].episodes.size());
    for (std::size_t e = 0; e < a.trials[t].episodes.size(); ++e) {
      ASSERT_TRUE(same_records(a.trials[t].episodes[e], b.trials[t].episodes[e]))
          << "trial " << t << " episode " << e;
    }
  }
}

// --- configuration ---------------------------------------------------------

TEST(Config, ParsesEverySection) {
  const auto cfg = parse_config(R"(
# comment
[experiment]
env = gridworld
mode = contract
trials = 4
train_episodes = 100
eval_episodes = 7
seed = 99
threads = 2
output_dir = somewhere

[gridworld]
visibility = 5
theta = 60
fallback = bfs
episode_len = 300
step_cost = 0.05

[sender]
discount = 0.8
eps_end = 0.1

[receiver]
follow_learning_rate = 0.02
)");
  EXPECT_EQ(cfg.env, EnvKind::Gridworld);
  EXPECT_EQ(cfg.mode, Mode::Contract);
  EXPECT_EQ(cfg.trials, 4);
  EXPECT_EQ(cfg.train_episodes, 100);
  EXPECT_EQ(cfg.eval_episodes, 7);
  EXPECT_EQ(cfg.master_seed, 99u);
  EXPECT_EQ(cfg.threads, 2);
  EXPECT_EQ(cfg.output_dir, fs::path("somewhere"));
  EXPECT_EQ(cfg.grid.grid.visibility, 5);
  EXPECT_EQ(cfg.grid.grid.theta_degrees, 60.0);
  EXPECT_EQ(cfg.grid.fallback, agents::FallbackKind::Bfs);
  EXPECT_EQ(cfg.grid.grid.episode_len, 300);
  EXPECT_EQ(cfg.grid.grid.step_cost, 0.05);
  EXPECT_EQ(cfg.sender.discount, 0.8);
  EXPECT_EQ(cfg.sender.eps_end, 0.1);
  EXPECT_EQ(cfg.receiver.follow_learning_rate, 0.02);
}

TEST(Config, LetterEpisodesFromInteractions) {
  const auto cfg = parse_config("[experiment]\nenv = letter\n[letter]\ninteractions = 200000\n");
  EXPECT_EQ(cfg.training_episodes(), 4000);
}

TEST(Config, UnknownKeyIsAnError) {
  EXPECT_THROW(parse_config("[experiment]\nbogus = 1\n"), ConfigError);
}

TEST(Config, UnknownSectionIsAnError) {
  EXPECT_THROW(parse_config("[nonsense]\ntrials = 1\n"), ConfigError);
}

TEST(Config, MalformedValuesAreErrors) {
  EXPECT_THROW(parse_config("[experiment]\ntrials = many\n"), ConfigError);
  EXPECT_THROW(parse_config("[experiment]\nmode = sometimes\n"), ConfigError);
  EXPECT_THROW(parse_config("[experiment]\ntrials\n"), ConfigError);
  EXPECT_THROW(parse_config("trials = 3\n"), ConfigError);
}

TEST(Config, ValidationNamesTheField) {
  auto cfg = small_grid(Mode::Signalling);
  cfg.trials = 0;
  try {
    cfg.validate();
    FAIL() << "expected a validation error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("trials"), std::string::npos);
  }
  cfg = small_grid(Mode::Signalling);
  cfg.grid.grid.theta_degrees = 200.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  auto letter = small_letter(Mode::Signalling);
  letter.letter.p0 = 0.7;
  EXPECT_THROW(letter.validate(), ConfigError);
}

TEST(Config, MissingFileIsAnError) {
  EXPECT_THROW(load_config("/nonexistent/persuade.ini"), ConfigError);
}

TEST(Config, PaperScale) {
  auto letter = small_letter(Mode::Signalling);
  apply_paper_scale(letter);
  EXPECT_EQ(letter.letter.interactions, 200000);
  EXPECT_EQ(letter.trials, 100);
  auto grid = small_grid(Mode::Signalling);
  apply_paper_scale(grid);
  EXPECT_EQ(grid.train_episodes, 2000);
  EXPECT_EQ(grid.eval_episodes, 100);
  EXPECT_EQ(grid.trials, 10);
}

// --- experiment ------------------------------------------------------------

TEST(Experiment, TrialSeedsAreStableAndDistinct) {
  std::set<std::uint64_t> seeds;
  for (int t = 0; t < 1000; ++t) seeds.insert(trial_seed(1, t));
  EXPECT_EQ(seeds.size(), 1000u);
  EXPECT_EQ(trial_seed(1, 3), trial_seed(1, 3));
  EXPECT_NE(trial_seed(1, 3), trial_seed(2, 3));
}

TEST(Experiment, RunsProduceOneRecordPerEpisode) {
  const auto cfg = small_grid(Mode::Contract);
  const auto run = run_experiment(cfg);
  ASSERT_EQ(run.trials.size(), 3u);
  for (const auto& trial : run.trials) {
    ASSERT_EQ(trial.episodes.size(), 45u);
    for (std::size_t e = 0; e < trial.episodes.size(); ++e) {
      EXPECT_EQ(trial.episodes[e].episode_id, static_cast<std::int64_t>(e));
      EXPECT_EQ(trial.episodes[e].eval, e >= 40);
    }
  }
}

TEST(Experiment, SameConfigIsBitwiseIdentical) {
  auto cfg = small_grid(Mode::Contract);
  cfg.trials = 1;
  cfg.train_episodes = 1;
  cfg.eval_episodes = 0;
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  expect_same_runs(a, b);
  const auto dir_a = scratch_dir("det_a");
  const auto dir_b = scratch_dir("det_b");
  const auto files = write_artifacts(a, dir_a);
  write_artifacts(b, dir_b);
  ASSERT_EQ(files.size(), 5u);
  for (const auto& f : files) EXPECT_EQ(slurp(f), slurp(dir_b / f.filename())) << f;
}

TEST(Experiment, ParallelMatchesSerial) {
  for (auto cfg : {small_grid(Mode::Contract), small_letter(Mode::Contract)}) {
    cfg.trials = 5;
    expect_same_runs(run_experiment(cfg, 1), run_experiment(cfg, 4));
  }
}

TEST(Experiment, AggregateIsMeanOfTrialMeans) {
  const auto cfg = small_grid(Mode::Signalling);
  const auto run = run_experiment(cfg);
  std::vector<double> means;
  for (const auto& trial : run.trials) {
    double total = 0.0;
    int n = 0;
    for (const auto& rec : trial.episodes) {
      if (!rec.eval) continue;
      total += rec.receiver_return;
      ++n;
    }
    means.push_back(total / n);
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= static_cast<double>(means.size());
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  const double sd = std::sqrt(ss / static_cast<double>(means.size() - 1));
  EXPECT_NEAR(run.summary.receiver_return.mean, mean, 1e-12);
  EXPECT_NEAR(run.summary.receiver_return.sd, sd, 1e-12);
  EXPECT_EQ(run.summary.trials, 3);
}

TEST(Experiment, SummarizeMatchesTwoPass) {
  Rng rng(5);
  std::vector<double> xs;
  for (int i = 0; i < 1000; ++i) xs.push_back(1e3 + rng.uniform());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= 1000.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const auto s = summarize(xs);
  EXPECT_NEAR(s.mean, mean, 1e-12 * mean);
  EXPECT_NEAR(s.sd, std::sqrt(ss / 999.0), 1e-12);
  EXPECT_EQ(summarize({4.0}).sd, 0.0);
}

TEST(Experiment, LetterSummaryIsPerInteraction) {
  const auto cfg = small_letter(Mode::Signalling);
  const auto run = run_experiment(cfg);
  double total = 0.0;
  for (const auto& trial : run.trials) {
    double s = 0.0;
    for (const auto& rec : trial.episodes) s += rec.sender_return;
    total += s / static_cast<double>(trial.episodes.size()) / cfg.letter.episode_len;
  }
  EXPECT_NEAR(run.summary.sender_return.mean, total / 3.0, 1e-12);
  for (const auto& rec : run.trials[0].episodes) {
    EXPECT_TRUE(rec.p2.has_value());
    EXPECT_LE(rec.apples + rec.diamonds, cfg.letter.episode_len);
  }
}

TEST(Experiment, BaselineHasNoSender) {
  auto cfg = small_grid(Mode::Baseline);
  const auto run = run_experiment(cfg);
  for (const auto& rec : run.trials[0].episodes) {
    EXPECT_EQ(rec.arm, -1);
    EXPECT_FALSE(rec.accepted);
    EXPECT_FALSE(rec.follow_rate.has_value());
    const auto rs = sender_reward_vector(45.0);
    EXPECT_NEAR(rec.sender_return,
                rec.apples * rs.x() + rec.diamonds * rs.y() -
                    cfg.grid.grid.episode_len * cfg.grid.grid.step_cost,
                1e-9);
  }
}

TEST(Experiment, TransferScalesReceiverReturn) {
  const auto cfg = small_grid(Mode::Contract);
  const auto run = run_experiment(cfg);
  const double penalty = cfg.grid.grid.episode_len * cfg.grid.grid.step_cost;
  for (const auto& trial : run.trials) {
    for (const auto& rec : trial.episodes) {
      const double share = rec.accepted ? rec.c : 0.0;
      EXPECT_NEAR(rec.receiver_return, (rec.apples - penalty) * (1.0 - share), 1e-9);
    }
  }
}

TEST(Experiment, RejectedEpisodesCarryNoAdvice) {
  const auto cfg = small_grid(Mode::Contract);
  const auto run = run_experiment(cfg);
  int rejected = 0;
  for (const auto& trial : run.trials) {
    for (const auto& rec : trial.episodes) {
      if (!rec.accepted) {
        ++rejected;
        EXPECT_FALSE(rec.follow_rate.has_value());
      }
    }
  }
  EXPECT_GT(rejected, 0);
}

// --- export ----------------------------------------------------------------

TEST(Export, Deciles) {
  EXPECT_EQ(decile_of(0, 2000), 0);
  EXPECT_EQ(decile_of(199, 2000), 0);
  EXPECT_EQ(decile_of(200, 2000), 1);
  EXPECT_EQ(decile_of(1999, 2000), 9);
  EXPECT_EQ(decile_of(4, 5), 8);
}

TEST(Export, FormatRealUsesSixSignificantDigits) {
  EXPECT_EQ(format_real(0.1234567), "0.123457");
  EXPECT_EQ(format_real(2.0), "2");
  EXPECT_EQ(format_real(-20.8123456), "-20.8123");
  EXPECT_EQ(format_real(1234567.0), "1.23457e+06");
}

RunResult scripted_contract_run(std::int64_t episodes, bool always_accept) {
  RunResult run;
  run.config.env = EnvKind::Gridworld;
  run.config.mode = Mode::Contract;
  run.config.trials = 1;
  run.config.train_episodes = episodes;
  run.config.eval_episodes = 0;
  const auto space = agents::grid_strategy_space(true);
  Rng rng(77);
  TrialResult trial;
  for (std::int64_t e = 0; e < episodes; ++e) {
    EpisodeRecord rec;
    rec.episode_id = e;
    rec.arm = static_cast<std::int64_t>(rng.index(static_cast<std::size_t>(space.size())));
    rec.p = space[rec.arm].p();
    rec.c = space[rec.arm].c();
    rec.accepted = always_accept || rng.bernoulli(0.5);
    trial.episodes.push_back(rec);
  }
  run.trials.push_back(std::move(trial));
  return run;
}

TEST(Export, UniformArmsAreFlat) {
  const auto run = scripted_contract_run(400000, true);
  const auto rows = arm_frequencies(run);
  ASSERT_EQ(rows.size(), 360u);
  std::map<int, double> decile_total;
  for (const auto& row : rows) {
    EXPECT_NEAR(row.percent, 100.0 / 36.0, 0.5);
    decile_total[row.decile] += row.percent;
  }
  for (const auto& [d, total] : decile_total) EXPECT_NEAR(total, 100.0, 1e-9) << d;
}

TEST(Export, AlwaysAcceptIsHundredPercent) {
  const auto run = scripted_contract_run(3600, true);
  const auto rows = acceptance_rates(run);
  ASSERT_FALSE(rows.empty());
  for (const auto& row : rows) {
    if (row.proposed == 0) continue;
    ASSERT_TRUE(row.rate.has_value());
    EXPECT_EQ(*row.rate, 1.0);
  }
}

TEST(Export, OverallAcceptanceRowPerDecile) {
  const auto run = scripted_contract_run(3600, false);
  int overall = 0;
  for (const auto& row : acceptance_rates(run)) {
    if (row.arm) continue;
    ++overall;
    EXPECT_EQ(row.proposed, 360);
    EXPECT_NEAR(*row.rate, 0.5, 0.1);
  }
  EXPECT_EQ(overall, 10);
}

TEST(Export, SignallingRunHasEmptyAcceptanceTableAndWarning) {
  const auto run = run_experiment(small_grid(Mode::Signalling));
  EXPECT_TRUE(acceptance_rates(run).empty());
  ASSERT_EQ(run.warnings.size(), 1u);
  const auto dir = scratch_dir("signalling");
  write_artifacts(run, dir);
  std::istringstream acceptance(slurp(dir / "acceptance.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(acceptance, line)) ++lines;
  EXPECT_EQ(lines, 1);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["warnings"].size(), 1u);
}

TEST(Export, ArtifactsHaveDocumentedHeaders) {
  const auto run = run_experiment(small_grid(Mode::Contract));
  const auto dir = scratch_dir("headers");
  write_artifacts(run, dir);
  auto header = [&](const char* name) {
    std::istringstream in(slurp(dir / name));
    std::string line;
    std::getline(in, line);
    return line;
  };
  EXPECT_EQ(header("episodes.csv"),
            "trial_id,episode_id,phase,arm,p,p2,c,accepted,receiver_return,sender_return,"
            "apples,diamonds,follow_rate");
  EXPECT_EQ(header("arms.csv"), "decile,arm,p,p2,c,count,percent");
  EXPECT_EQ(header("acceptance.csv"), "decile,arm,p,p2,c,proposed,accepted,rate");
  EXPECT_EQ(header("summary.csv").rfind("env,mode,theta,visibility,fallback,p0,trials", 0), 0u);

  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["master_seed"], 1);
  EXPECT_EQ(manifest["trial_seeds"].size(), 3u);
  EXPECT_EQ(manifest["trial_seeds"][1], trial_seed(1, 1));
  EXPECT_EQ(manifest["eval_exploration"], 0.0);
  EXPECT_EQ(manifest["config"]["experiment"]["mode"], "contract");
}

TEST(Export, IoFailureNamesThePath) {
  const auto dir = scratch_dir("io");
  fs::create_directories(dir);
  const auto blocker = dir / "file";
  std::ofstream(blocker) << "x";
  const auto run = run_experiment(small_grid(Mode::Signalling));
  try {
    write_artifacts(run, blocker / "sub");
    FAIL() << "expected an IO error";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(blocker.string()), std::string::npos);
  }
}

// --- learning trends on full-size gridworld cells --------------------------

TEST(Trends, AlignedContractChargesHighShare) {
  ExperimentConfig cfg;
  cfg.mode = Mode::Contract;
  cfg.grid.grid.theta_degrees = 0.0;
  const auto run = run_experiment(cfg);
  const auto rows = arm_frequencies(run);
  const ArmFrequencyRow* modal = nullptr;
  for (const auto& row : rows) {
    if (row.decile == kDeciles - 1 && (!modal || row.percent > modal->percent)) modal = &row;
  }
  ASSERT_NE(modal, nullptr);
  EXPECT_GE(modal->coords.c, 0.8 - 1e-9);
}

TEST(Trends, OrthogonalSignallingSettlesOnZeroCommitment) {
  ExperimentConfig cfg;
  cfg.mode = Mode::Signalling;
  cfg.grid.grid.theta_degrees = 90.0;
  const auto run = run_experiment(cfg);
  EXPECT_EQ(modal_p(arm_frequencies(run), kDeciles - 1), 0.0);
}

}  // namespace
}  // namespace persuade::harness
