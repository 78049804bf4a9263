#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "conehull/body.hpp"
#include "conehull/rational.hpp"
#include "conehull/rng.hpp"
#include "conehull/stats.hpp"
#include "conehull/types.hpp"

namespace conehull {

// ---------------------------------------------------------------------------
// Exact moments on the cross-polytope

struct MomentSpec {
  int n = 1;
  std::vector<int> q;  ///< half-exponents, one per coordinate

  int total_q() const;
};

/// int over B_1^n of prod x_i^{2 q_i} dx = 2^n prod (2 q_i)! / (n + 2q)!.
Rational l1_ball_monomial_moment(const MomentSpec& spec);

/// Ratio (uniform moment) / (cone moment) of |<x, theta>|^p: n / (n + p).
double moment_transfer_coefficient(int n, double p);
Rational moment_transfer_coefficient_exact(int n, int p);

/// Caps of the composition enumeration in cone_moment_linear.
inline constexpr int kMaxConeMomentOrder = 6;
inline constexpr int kMaxConeMomentDim = 12;

/// int over the boundary of B_1^n of |<x, theta>|^{2q} d mu, by multinomial
/// expansion over compositions of q. Errors: BudgetExceeded beyond the caps.
Rational cone_moment_linear(int n, const std::vector<Rational>& theta, int q);
Rational cone_moment_linear(const Vector& theta, int q);

// ---------------------------------------------------------------------------
// Orlicz norms

struct OrliczEstimate {
  int alpha = 2;
  double value = 0.0;  ///< lambda with mean exp((|v|/lambda)^alpha) = 2
  std::size_t sample_count = 0;
  double bisection_tolerance = 0.0;  ///< relative width of the final bracket
  double bracket_low = 0.0;          ///< initial lambda bracket
  double bracket_high = 0.0;
  double residual = 0.0;  ///< mean exp((|v|/value)^alpha) - 2
  /// Percentile bootstrap band; equals [value, value] when not computed.
  double band_low = 0.0;
  double band_high = 0.0;
  int resamples = 0;
};

/// Bisection for the Luxemburg norm of the empirical distribution.
/// Errors: Degenerate when every value is zero, InvalidArgument for alpha
/// outside {1, 2} or empty input.
OrliczEstimate empirical_orlicz_norm(const std::vector<double>& values, int alpha);

/// Same, with a percentile bootstrap band over `resamples` resamples.
OrliczEstimate empirical_orlicz_norm(const std::vector<double>& values, int alpha, RandomStream& rng,
                                     int resamples = 200, double confidence = 0.95);

// ---------------------------------------------------------------------------
// Bernstein inequalities

enum class BernsteinVariant { Psi2, Psi1 };

/// psi2: 2 exp(-t^2 n / (8 R^2)); psi1: 2 exp(-(t n / (6 R)) min{t / R, 1}).
/// The raw value lies in (0, 2].
double bernstein_bound(BernsteinVariant variant, double R, double t, int n);
/// min{1, bernstein_bound}, the form used in reports.
double bernstein_bound_reported(BernsteinVariant variant, double R, double t, int n);

// ---------------------------------------------------------------------------
// Empirical checks

struct TailPoint {
  double t = 0.0;
  double frequency = 0.0;
  double standard_error = 0.0;
  double bound = 0.0;
  bool pass = true;
};

struct Psi2ThetaResult {
  Vector theta;
  OrliczEstimate psi2;
  double bound = 0.0;  ///< psi2_constant * sqrt(n) * ||theta||_inf
  bool pass = true;    ///< upper band <= bound and all tail points pass
  std::vector<TailPoint> tails;
};

struct Psi2Options {
  double psi2_constant = 3.0;  ///< overridable for negative controls
  std::vector<double> t_grid = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  int resamples = 200;
  double se_multiplier = 4.0;
};

struct Psi2Report {
  std::string body;
  int n = 0;
  std::size_t sample_count = 0;
  std::vector<Psi2ThetaResult> results;
  bool pass = true;
};

/// psi_2 norm of <X, theta> under the cone measure of an isotropic
/// unconditional body against psi2_constant sqrt(n) ||theta||_inf, plus the
/// tail dominance P(|<X,theta>| >= t sqrt(n) ||theta||_inf) <= 2 exp(-t^2/9)
/// with the same constant in place of 3. Errors: InvalidArgument when the
/// body is not unconditional or not isotropic.
Psi2Report verify_psi2_unconditional(const BodySpec& body, const std::vector<Vector>& thetas,
                                     std::size_t sample_count, RandomStream& rng,
                                     const Psi2Options& options = {});

struct Psi1ThetaResult {
  Vector theta;
  OrliczEstimate psi1;
  OrliczEstimate psi2;
  double ratio_to_lk = 0.0;     ///< psi1 upper band / L_K
  bool conversion_ok = true;    ///< psi1 <= psi2 / ln 2
};

struct Psi1Report {
  std::string body;
  int n = 0;
  double isotropic_constant = 0.0;
  std::vector<Psi1ThetaResult> results;
  double max_ratio = 0.0;
  bool conversion_ok = true;
};

/// psi_1 norm of <X, theta> under the cone measure of an isotropic body,
/// reported as a ratio to L_K. Errors: InvalidArgument when not isotropic.
Psi1Report verify_psi1_general(const BodySpec& body, const std::vector<Vector>& thetas,
                               std::size_t sample_count, RandomStream& rng, int resamples = 200);

struct SumTailReport {
  BernsteinVariant variant = BernsteinVariant::Psi2;
  int n_terms = 0;
  std::size_t trials = 0;
  double R = 0.0;
  std::vector<TailPoint> points;
  bool pass = true;
};

/// Simulates S = <X_1 + ... + X_k, theta> with X_j cone points and compares
/// P(|S| > t k) with Bernstein's bound. Psi2 uses R = 3 sqrt(n) ||theta||_inf
/// (2 exp(-t^2/72) when k = n and ||theta||_inf = 1); Psi1 uses R = the
/// upper bootstrap band of the empirical psi_1 norm of <X, theta>.
SumTailReport empirical_sum_tail(const BodySpec& body, const Vector& theta, int n_terms,
                                 const std::vector<double>& t_grid, std::size_t trials,
                                 RandomStream& rng, BernsteinVariant variant);

// ---------------------------------------------------------------------------
// Certified psi_2 bound on the cross-polytope

/// Exact evaluation of E exp((<X,theta>/lambda)^2) under the cone measure of
/// B_1^n, truncated after q = truncation, plus the geometric remainder from
/// the term bound (q!/2) (2 alpha / n)^{2q}, alpha = sqrt(n) ||theta||_inf.
struct SeriesCertificate {
  int n = 0;
  int truncation = kMaxConeMomentOrder;
  double theta_inf = 0.0;
  double lambda0 = 0.0;        ///< sqrt(6) ||theta||_inf / sqrt(n)
  double partial_sum = 0.0;    ///< at lambda0, exact value rounded
  double remainder = 0.0;      ///< at lambda0, exact value rounded
  bool certified = false;      ///< partial_sum + remainder <= 2 in exact arithmetic
  double lambda_cert = 0.0;    ///< smallest lambda found with a certificate
  double lambda_lower = 0.0;   ///< the partial sum alone exceeds 2 below this
  double scaled = 0.0;         ///< sqrt(n) * lambda_cert
  double bound = 0.0;          ///< sqrt(6) ||theta||_inf
  bool pass = false;           ///< certified and scaled <= bound (1 + 1e-9)
};

SeriesCertificate certify_l1_psi2(const Vector& theta, int truncation = kMaxConeMomentOrder);

/// Exact cone moment of |<x,theta>|^{2q} on the boundary of c B_1^n, c^2 given exactly.
Rational scaled_cone_moment_linear(const Vector& theta, int q, const Rational& c_squared);

// ---------------------------------------------------------------------------
// Monte Carlo moment helpers

struct MomentEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Mean of |<x, theta>|^p over the columns of `points`.
MomentEstimate empirical_abs_moment(const Matrix& points, const Vector& theta, double p);

/// Ratio of a uniform and an independent cone moment with a delta-method s.e.
MomentEstimate moment_ratio(const MomentEstimate& numerator, const MomentEstimate& denominator);

/// Values <x_i, theta> for the columns of `points`.
std::vector<double> projections(const Matrix& points, const Vector& theta);

}  // namespace conehull
