#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

namespace conehull {

/// Below this sample count statistical checks are reported as widened-band
/// instead of pass/fail.
inline constexpr std::size_t kFullScaleSamples = 10000;

struct VerificationConfig {
  std::uint64_t master_seed = 20240611;
  std::size_t sample_count = 100000;
  /// Dimensions for the sampling-based checks.
  std::vector<int> dims = {2, 4, 6};
  /// Random thetas per check on top of e_1 and (1, ..., 1).
  int random_thetas = 2;
  int resamples = 200;
  /// Random K_N instances per (n, N) for the polytope checks.
  int polytopes = 20;
  /// Constant of the psi_2 bound; a test hook for negative controls.
  double psi2_constant = 3.0;
  unsigned workers = 1;

  /// Errors: ConfigError on unknown keys or invalid values.
  static VerificationConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

struct CheckResult {
  std::string check;
  std::string body;
  int n = 0;
  nlohmann::json params = nlohmann::json::object();
  double empirical = std::numeric_limits<double>::quiet_NaN();
  double bound = std::numeric_limits<double>::quiet_NaN();
  double standard_error = std::numeric_limits<double>::quiet_NaN();
  bool pass = true;
  /// Exact or deterministic check; a failure changes the exit code.
  bool hard = false;
  std::string status;  ///< "pass", "fail" or "widened-band"

  nlohmann::json to_json() const;
};

struct VerificationReport {
  VerificationConfig config;
  std::vector<CheckResult> checks;

  std::size_t hard_failures() const;
  std::size_t statistical_failures() const;
  nlohmann::json to_json() const;
  /// 1 when a hard check failed, 0 otherwise.
  int exit_code() const;
};

/// Runs the invariant checks of the geometry, isotropy and concentration
/// modules. Check groups run in parallel on independent streams and are
/// reported in a fixed order.
VerificationReport run_verification_suite(const VerificationConfig& config);

}  // namespace conehull
