#pragma once

#include <cstdint>
#include <limits>

#include "conehull/gauge.hpp"
#include "conehull/hull.hpp"
#include "conehull/rng.hpp"
#include "conehull/types.hpp"

namespace conehull {

/// L = det(C)^{1/(2n)} / |K|^{1/n} with C = (int_K x x^T) / |K|.
/// Errors: SingularCovariance when C is not positive definite.
double isotropic_constant_from_moments(double volume, const Matrix& second_moment_integral);

double isotropic_constant_polytope(const SymmetricPolytope& polytope);

enum class L1Mode { Auto, Exact, MonteCarlo };

struct BoundChainOptions {
  /// Auto uses the exact integral up to kAutoExactL1Dim.
  L1Mode l1_mode = L1Mode::Auto;
  std::size_t l1_samples = 100000;
};

struct BoundChain {
  double l_exact = 0.0;
  /// (1/(n |P|^{1+1/n})) int ||x||_1, without the absolute constant.
  double l1_bound_raw = 0.0;
  double l1_bound_raw_se = 0.0;
  bool l1_exact = false;
  /// sqrt((1/(n |P|^{1+2/n})) int ||x||_2^2).
  double l2_bound = 0.0;
  /// ((1+sqrt 2)/n) max over facets and signs of ||sum eps_i y_i||_1.
  double facet_l1 = std::numeric_limits<double>::quiet_NaN();
  /// (2/((n+1)(n+2))) max over facets and signs of ||sum eps_i y_i||_2^2.
  double facet_l2sq = std::numeric_limits<double>::quiet_NaN();
  double volume_radius = 0.0;
  /// (1/|P|) int ||x||_1 and (1/|P|) int ||x||_2^2, the left sides of the
  /// facet inequalities.
  double mean_l1 = 0.0;
  double mean_l1_se = 0.0;
  double mean_l2sq = 0.0;
};

/// `rng` is required when the 1-norm integral is estimated by Monte Carlo.
BoundChain bound_chain(const SymmetricPolytope& polytope, RandomStream* rng = nullptr,
                       const BoundChainOptions& options = {});

/// Monte Carlo bound chain from radial estimates (no facets: facet columns NaN).
BoundChain bound_chain(int dim, const RadialEstimate& radial);

enum class SubsetNorm { L1, L2 };
enum class SubsetMode { Auto, Exhaustive, Random };

/// Exhaustive enumeration is allowed while C(2N, n) 2^{n-1} stays below this.
inline constexpr std::uint64_t kExhaustiveSubsetCap = 10'000'000;

struct SubsetMax {
  double value = 0.0;
  bool exhaustive = false;  ///< false: the value is a lower bound on the true max
  std::uint64_t subsets = 0;
};

/// max over n-element subsets {z_1..z_n} of {+-X_1..+-X_N} and signs of
/// ||eps_1 z_1 + ... + eps_n z_n||. `points` holds the X_i as columns.
/// Random mode draws `subset_budget` uniform subsets.
/// Errors: BudgetExceeded when Exhaustive is requested beyond the cap.
SubsetMax max_subset_sign_sum(const Matrix& points, SubsetNorm norm, std::uint64_t subset_budget,
                              RandomStream& rng, SubsetMode mode = SubsetMode::Auto,
                              std::uint64_t exhaustive_cap = kExhaustiveSubsetCap);

/// C(2N, n) 2^{n-1}, saturating at UINT64_MAX.
std::uint64_t exhaustive_subset_work(int dim, std::size_t count);

}  // namespace conehull
