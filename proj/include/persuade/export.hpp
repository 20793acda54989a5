#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "persuade/experiment.hpp"

namespace persuade::harness {

/// File-system failure; the message names the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kDeciles = 10;

/// Training-phase decile of a training episode.
int decile_of(std::int64_t episode_id, std::int64_t training_episodes);

/// Strategy coordinates of an arm: p (p1 in the letter game), p2 (letter
/// only) and c.
struct ArmCoordinates {
  double p = 0.0;
  std::optional<double> p2;
  double c = 0.0;
};

std::vector<ArmCoordinates> arm_coordinates(const ExperimentConfig& cfg);

struct ArmFrequencyRow {
  int decile = 0;
  std::int64_t arm = 0;
  ArmCoordinates coords;
  std::int64_t count = 0;
  /// Share of that decile's proposals, in percent.
  double percent = 0.0;
};

/// Selection percentages per (decile, arm) over training episodes pooled
/// across trials; every decile sums to 100.
std::vector<ArmFrequencyRow> arm_frequencies(const RunResult& run);

struct AcceptanceRow {
  int decile = 0;
  /// nullopt for the decile's overall row.
  std::optional<std::int64_t> arm;
  ArmCoordinates coords;
  std::int64_t proposed = 0;
  std::int64_t accepted = 0;
  /// nullopt when the arm was never proposed in the decile.
  std::optional<double> rate;
};

/// Per-arm and overall acceptance per decile; empty unless contract mode.
std::vector<AcceptanceRow> acceptance_rates(const RunResult& run);

/// Percentage mass per p value in one decile of an arm table.
std::vector<std::pair<double, double>> p_marginal(const std::vector<ArmFrequencyRow>& rows,
                                                  int decile);
/// p value with the largest mass in `decile` (ties to the lower p).
double modal_p(const std::vector<ArmFrequencyRow>& rows, int decile);

/// `{:.6g}` formatting used by every CSV.
std::string format_real(double x);

void write_episodes_csv(const RunResult& run, const std::filesystem::path& path);
void write_arms_csv(const std::vector<ArmFrequencyRow>& rows, const std::filesystem::path& path);
void write_acceptance_csv(const std::vector<AcceptanceRow>& rows,
                          const std::filesystem::path& path);
void write_summary_csv(const AggregateRow& row, const std::filesystem::path& path);
void write_manifest(const RunResult& run, const std::filesystem::path& path);

/// Writes episodes.csv, arms.csv, acceptance.csv, summary.csv and
/// manifest.json into `dir` (created if missing).
std::vector<std::filesystem::path> write_artifacts(const RunResult& run,
                                                   const std::filesystem::path& dir);

}  // namespace persuade::harness
