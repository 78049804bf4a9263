#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "conehull/body.hpp"
#include "conehull/isotropy.hpp"

namespace conehull {

enum class ExperimentKind { Unconditional, General, VolumeRadius };
enum class PathMode { Auto, Exact, MonteCarlo };

/// Mirrors the JSON config document. Bodies are given without "dim"; each
/// entry is instantiated for every n in `dims` and isotropic-normalized.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Unconditional;
  std::vector<nlohmann::json> bodies;
  std::vector<int> dims;
  /// Terms such as "2n", "n^2", "nlogn" or plain integers; resolved per n.
  std::vector<std::string> n_schedule;
  int trials = 200;
  std::uint64_t master_seed = 1;
  PathMode mode = PathMode::Auto;
  bool subset_max = false;
  std::uint64_t subset_budget = 10000;
  std::uint64_t subset_cap = kExhaustiveSubsetCap;
  L1Mode l1_mode = L1Mode::Auto;
  std::size_t l1_samples = 20000;
  std::size_t radial_directions = 4000;
  /// Trials per cell whose exact volume is also estimated radially.
  int cross_validate_trials = 0;
  int bootstrap_resamples = 1000;
  unsigned workers = 1;
  std::string csv_path;
  std::string json_path;

  /// Errors: ConfigError for malformed documents, empty schedules, n >= N.
  static ExperimentConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

/// Sorted, de-duplicated sample sizes for dimension n.
/// Errors: ConfigError for unknown terms or any N <= n.
std::vector<std::size_t> resolve_schedule(const std::vector<std::string>& terms, int n);

/// Label used in reports, e.g. "cross_polytope" or "lp_ball_p4".
std::string body_label(const nlohmann::json& entry);

struct TrialRow {
  int trial = 0;
  int n = 0;
  std::size_t N = 0;
  std::string body;
  BoundChain chain;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  bool ok = true;
  std::string error;
  bool exact = true;
  int vertices = 0;
  double volume = 0.0;
  double mc_volume = std::numeric_limits<double>::quiet_NaN();
  double mc_volume_se = std::numeric_limits<double>::quiet_NaN();
  double subset_l1 = std::numeric_limits<double>::quiet_NaN();
  double subset_l2 = std::numeric_limits<double>::quiet_NaN();
  bool subset_exhaustive = false;
  double l_normalized = 0.0;           ///< L / sqrt(log(2N/n))
  double vol_radius_normalized = 0.0;  ///< |K_N|^{1/n} / min{sqrt(log(2N/n)/n), 1}
  bool consistent = true;              ///< l_exact <= l2_bound (1e-12 relative slack)
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::Unconditional;
  std::vector<TrialRow> rows;  ///< in (body, n, N, trial) order
  nlohmann::json summary;
  std::vector<std::string> warnings;
  bool pass = true;

  void write_csv(std::ostream& out) const;
};

/// Theorem-shape runs: cone points of isotropic bodies, K_N, bound chain.
/// The unconditional run requires unconditional bodies (ConfigError otherwise)
/// and tracks L; the general run tracks L / sqrt(log(2N/n)) and warns about
/// cells with N > exp(sqrt n).
ExperimentReport run_unconditional_experiment(const ExperimentConfig& config);
ExperimentReport run_general_experiment(const ExperimentConfig& config);

struct VolumeRadiusRow {
  int trial = 0;
  int n = 0;
  std::size_t N = 0;
  std::string body;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  bool ok = true;
  std::string error;
  double vol_radius = 0.0;          ///< |K_N|^{1/n}, cone points
  double vol_radius_uniform = 0.0;  ///< |conv{+-Y}|^{1/n}, the coupled uniform points
  bool inclusion = true;            ///< every Y_i lies in K_N
  bool coupling = true;             ///< |conv{+-Y}| <= |K_N|
  bool nested = true;               ///< not smaller than at the previous N of the schedule
  double ratio_a = 0.0;             ///< vol_radius / min{sqrt(log(2N/n)/n), 1}
  double ratio_b = 0.0;             ///< vol_radius / (L_K sqrt(log(2N/n)/n))
  std::size_t zero_redraws = 0;
};

struct VolumeRadiusReport {
  std::vector<VolumeRadiusRow> rows;
  nlohmann::json summary;
  bool pass = true;

  void write_csv(std::ostream& out) const;
};

/// Per trial, one coupled batch of the largest N is drawn and its prefixes
/// give nested batches for the smaller N, so every trial is monotone in N.
VolumeRadiusReport run_volume_radius_check(const ExperimentConfig& config);

/// Dispatches on config.kind and writes the configured CSV and JSON outputs.
/// Returns the exit code: 0 when the report passes, 1 otherwise.
int run_configured(const ExperimentConfig& config, std::ostream& log);

}  // namespace conehull
