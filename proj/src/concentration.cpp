#include "conehull/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "conehull/error.hpp"
#include "conehull/sampling.hpp"

namespace conehull {
namespace {

Rational rational_power(const Rational& x, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

/// Calls f(parts) for every composition of `total` into parts.size() nonnegative parts.
template <class F>
void for_each_composition(std::vector<int>& parts, std::size_t k, int total, F& f) {
  if (k + 1 == parts.size()) {
    parts[k] = total;
    f(parts);
    return;
  }
  for (int v = 0; v <= total; ++v) {
    parts[k] = v;
    for_each_composition(parts, k + 1, total - v, f);
  }
}

std::vector<Rational> exact_theta(const Vector& theta) {
  std::vector<Rational> t;
  t.reserve(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) t.push_back(to_rational(theta(i)));
  return t;
}

struct Weighted {
  double a;
  double w;
};

/// mean_w exp(a s) - 2 and its derivative.
std::pair<double, double> luxemburg_equation(const std::vector<Weighted>& terms, double total_weight, double s) {
  double f = 0.0, df = 0.0;
  for (const auto& t : terms) {
    const double e = t.w * std::exp(t.a * s);
    f += e;
    df += t.a * e;
  }
  return {f / total_weight - 2.0, df / total_weight};
}

constexpr double kBisectionTolerance = 1e-13;

/// Root s of the Luxemburg equation in [ln 2 / a_max, ln(2m) / a_max],
/// where both ends bracket: mean exp(a s) <= exp(a_max s) and
/// mean exp(a s) >= exp(a_max s) / m.
double solve_bisection(const std::vector<Weighted>& terms, double total_weight, double a_max, double m) {
  double lo = std::log(2.0) / a_max;
  double hi = std::log(2.0 * m) / a_max;
  while ((hi - lo) > kBisectionTolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    if (luxemburg_equation(terms, total_weight, mid).first > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

/// Safeguarded Newton started at `s0`, used for bootstrap resamples.
double solve_newton(const std::vector<Weighted>& terms, double total_weight, double a_max, double m, double s0) {
  double lo = std::log(2.0) / a_max;
  double hi = std::log(2.0 * m) / a_max;
  double s = std::clamp(s0, lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const auto [f, df] = luxemburg_equation(terms, total_weight, s);
    if (f > 0.0)
      hi = s;
    else
      lo = s;
    double next = df > 0.0 ? s - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= kBisectionTolerance * s || (hi - lo) <= kBisectionTolerance * hi) return next;
    s = next;
  }
  return s;
}

double to_lambda(double s, int alpha) { return alpha == 2 ? 1.0 / std::sqrt(s) : 1.0 / s; }

void check_isotropic(const BodySpec& body, const char* what) {
  const IsotropicProfile profile = body_profile(body);
  const Matrix& c = profile.covariance;
  const double diag = c.diagonal().mean();
  const double off = (c - Matrix(c.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
  const double spread = (c.diagonal().array() - diag).abs().maxCoeff();
  if (std::abs(profile.volume - 1.0) > 1e-6 || off > 1e-6 * diag || spread > 1e-6 * diag)
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " requires an isotropic body, got " + body.describe());
}

}  // namespace

int MomentSpec::total_q() const {
  int t = 0;
  for (int v : q) t += v;
  return t;
}

Rational l1_ball_monomial_moment(const MomentSpec& spec) {
  if (spec.n < 1 || static_cast<int>(spec.q.size()) != spec.n)
    throw Error(ErrorKind::InvalidArgument, "moment spec needs n >= 1 and n half-exponents");
  Rational num = 1;
  mpz_class two_n = 1;
  mpz_mul_2exp(two_n.get_mpz_t(), two_n.get_mpz_t(), static_cast<mp_bitcnt_t>(spec.n));
  num = two_n;
  for (int qi : spec.q) {
    if (qi < 0) throw Error(ErrorKind::InvalidArgument, "negative half-exponent");
    num *= factorial(static_cast<unsigned long>(2 * qi));
  }
  Rational r = num / factorial(static_cast<unsigned long>(spec.n + 2 * spec.total_q()));
  r.canonicalize();
  return r;
}

double moment_transfer_coefficient(int n, double p) {
  if (n < 1 || !(p > 0.0)) throw Error(ErrorKind::InvalidArgument, "need n >= 1 and p > 0");
  return n / (n + p);
}

Rational moment_transfer_coefficient_exact(int n, int p) {
  if (n < 1 || p < 1) throw Error(ErrorKind::InvalidArgument, "need n >= 1 and p >= 1");
  Rational r(n, n + p);
  r.canonicalize();
  return r;
}

Rational cone_moment_linear(int n, const std::vector<Rational>& theta, int q) {
  if (n < 1 || static_cast<int>(theta.size()) != n || q < 0)
    throw Error(ErrorKind::InvalidArgument, "cone_moment_linear needs n >= 1, |theta| = n, q >= 0");
  if (q > kMaxConeMomentOrder || n > kMaxConeMomentDim)
    throw Error(ErrorKind::BudgetExceeded, "composition enumeration limited to q <= " +
                                               std::to_string(kMaxConeMomentOrder) + ", n <= " +
                                               std::to_string(kMaxConeMomentDim));
  std::vector<Rational> theta_sq(n);
  for (int i = 0; i < n; ++i) theta_sq[i] = theta[i] * theta[i];
  const Rational volume = l1_ball_monomial_moment({n, std::vector<int>(n, 0)});
  const Rational fact_2q = factorial(static_cast<unsigned long>(2 * q));
  Rational uniform = 0;
  MomentSpec spec{n, std::vector<int>(n, 0)};
  std::vector<int> parts(n, 0);
  auto add_term = [&](const std::vector<int>& parts) {
    Rational multinomial = fact_2q;
    Rational weight = 1;
    for (int i = 0; i < n; ++i) {
      multinomial /= factorial(static_cast<unsigned long>(2 * parts[i]));
      weight *= rational_power(theta_sq[i], parts[i]);
    }
    if (sgn(weight) == 0) return;
    spec.q = parts;
    uniform += multinomial * weight * l1_ball_monomial_moment(spec);
  };
  for_each_composition(parts, 0, q, add_term);
  Rational cone = uniform / volume * Rational(n + 2 * q, n);
  cone.canonicalize();
  return cone;
}

Rational cone_moment_linear(const Vector& theta, int q) {
  return cone_moment_linear(static_cast<int>(theta.size()), exact_theta(theta), q);
}

Rational scaled_cone_moment_linear(const Vector& theta, int q, const Rational& c_squared) {
  Rational r = rational_power(c_squared, q) * cone_moment_linear(theta, q);
  r.canonicalize();
  return r;
}

OrliczEstimate empirical_orlicz_norm(const std::vector<double>& values, int alpha) {
  if (alpha != 1 && alpha != 2) throw Error(ErrorKind::InvalidArgument, "alpha must be 1 or 2");
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  std::vector<Weighted> terms;
  terms.reserve(values.size());
  double a_max = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite sample value");
    const double a = alpha == 2 ? v * v : std::abs(v);
    terms.push_back({a, 1.0});
    a_max = std::max(a_max, a);
  }
  if (a_max == 0.0) throw Error(ErrorKind::Degenerate, "all sample values are zero");
  const double m = static_cast<double>(values.size());
  const double s = solve_bisection(terms, m, a_max, m);
  OrliczEstimate est;
  est.alpha = alpha;
  est.sample_count = values.size();
  est.bisection_tolerance = kBisectionTolerance;
  est.value = to_lambda(s, alpha);
  est.bracket_low = to_lambda(std::log(2.0 * m) / a_max, alpha);
  est.bracket_high = to_lambda(std::log(2.0) / a_max, alpha);
  // Residual at the reported lambda, recomputed from it.
  const double s_back = alpha == 2 ? 1.0 / (est.value * est.value) : 1.0 / est.value;
  est.residual = luxemburg_equation(terms, m, s_back).first;
  est.band_low = est.band_high = est.value;
  return est;
}

OrliczEstimate empirical_orlicz_norm(const std::vector<double>& values, int alpha, RandomStream& rng,
                                     int resamples, double confidence) {
  OrliczEstimate est = empirical_orlicz_norm(values, alpha);
  if (resamples < 1) return est;
  const std::size_t m = values.size();
  const double s_hat = alpha == 2 ? 1.0 / (est.value * est.value) : 1.0 / est.value;
  std::vector<double> a(m);
  for (std::size_t i = 0; i < m; ++i) a[i] = alpha == 2 ? values[i] * values[i] : std::abs(values[i]);
  std::vector<std::uint32_t> counts(m);
  std::vector<Weighted> terms;
  std::vector<double> lambdas;
  lambdas.reserve(static_cast<std::size_t>(resamples));
  for (int b = 0; b < resamples; ++b) {
    std::fill(counts.begin(), counts.end(), 0u);
    for (std::size_t k = 0; k < m; ++k) ++counts[uniform_index(rng, m)];
    terms.clear();
    double a_max = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (counts[i] == 0) continue;
      terms.push_back({a[i], static_cast<double>(counts[i])});
      a_max = std::max(a_max, a[i]);
    }
    if (a_max == 0.0) {
      lambdas.push_back(0.0);
      continue;
    }
    const double md = static_cast<double>(m);
    lambdas.push_back(to_lambda(solve_newton(terms, md, a_max, md, s_hat), alpha));
  }
  const double tail = 0.5 * (1.0 - confidence);
  est.band_low = quantile(lambdas, tail);
  est.band_high = quantile(lambdas, 1.0 - tail);
  est.resamples = resamples;
  return est;
}

double bernstein_bound(BernsteinVariant variant, double R, double t, int n) {
  if (!(R > 0.0) || !(t > 0.0) || n < 1) throw Error(ErrorKind::InvalidArgument, "bernstein_bound needs R, t > 0, n >= 1");
  if (variant == BernsteinVariant::Psi2) return 2.0 * std::exp(-t * t * n / (8.0 * R * R));
  return 2.0 * std::exp(-(t * n / (6.0 * R)) * std::min(t / R, 1.0));
}

double bernstein_bound_reported(BernsteinVariant variant, double R, double t, int n) {
  return std::min(1.0, bernstein_bound(variant, R, t, n));
}

std::vector<double> projections(const Matrix& points, const Vector& theta) {
  const Vector p = points.transpose() * theta;
  return {p.data(), p.data() + p.size()};
}

MomentEstimate empirical_abs_moment(const Matrix& points, const Vector& theta, double p) {
  const auto v = projections(points, theta);
  std::vector<double> powered(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) powered[i] = std::pow(std::abs(v[i]), p);
  return {mean(powered), standard_error(powered)};
}

MomentEstimate moment_ratio(const MomentEstimate& numerator, const MomentEstimate& denominator) {
  const double r = numerator.value / denominator.value;
  const double rel = std::hypot(numerator.standard_error / numerator.value,
                                denominator.standard_error / denominator.value);
  return {r, std::abs(r) * rel};
}

Psi2Report verify_psi2_unconditional(const BodySpec& body, const std::vector<Vector>& thetas,
                                     std::size_t sample_count, RandomStream& rng, const Psi2Options& options) {
  if (!is_unconditional(body))
    throw Error(ErrorKind::InvalidArgument, "psi2 check requires an unconditional body, got " + body.describe());
  check_isotropic(body, "psi2 check");
  const int n = body.dim();
  const SampleBatch batch = sample_cone_boundary(body, sample_count, rng);
  Psi2Report report;
  report.body = body.describe();
  report.n = n;
  report.sample_count = sample_count;
  const double c = options.psi2_constant;
  for (const Vector& theta : thetas) {
    Psi2ThetaResult r;
    r.theta = theta;
    const double tinf = theta.lpNorm<Eigen::Infinity>();
    const auto v = projections(batch.points, theta);
    r.psi2 = empirical_orlicz_norm(v, 2, rng, options.resamples);
    r.bound = c * std::sqrt(static_cast<double>(n)) * tinf;
    r.pass = r.psi2.band_high <= r.bound;
    for (double t : options.t_grid) {
      TailPoint tp;
      tp.t = t;
      const double level = t * std::sqrt(static_cast<double>(n)) * tinf;
      std::size_t hits = 0;
      for (double x : v) hits += std::abs(x) >= level;
      tp.frequency = static_cast<double>(hits) / static_cast<double>(v.size());
      tp.standard_error = binomial_standard_error(tp.frequency, v.size());
      tp.bound = 2.0 * std::exp(-t * t / (c * c));
      tp.pass = tp.frequency <= tp.bound + options.se_multiplier * tp.standard_error;
      r.pass = r.pass && tp.pass;
      r.tails.push_back(tp);
    }
    report.pass = report.pass && r.pass;
    report.results.push_back(std::move(r));
  }
  return report;
}

Psi1Report verify_psi1_general(const BodySpec& body, const std::vector<Vector>& thetas,
                               std::size_t sample_count, RandomStream& rng, int resamples) {
  check_isotropic(body, "psi1 check");
  const SampleBatch batch = sample_cone_boundary(body, sample_count, rng);
  Psi1Report report;
  report.body = body.describe();
  report.n = body.dim();
  report.isotropic_constant = body_isotropic_constant(body);
  for (const Vector& theta : thetas) {
    Psi1ThetaResult r;
    r.theta = theta;
    const auto v = projections(batch.points, theta);
    r.psi1 = empirical_orlicz_norm(v, 1, rng, resamples);
    r.psi2 = empirical_orlicz_norm(v, 2, rng, resamples);
    r.ratio_to_lk = r.psi1.band_high / report.isotropic_constant;
    r.conversion_ok = r.psi1.value <= r.psi2.value / std::numbers::ln2;
    report.max_ratio = std::max(report.max_ratio, r.ratio_to_lk);
    report.conversion_ok = report.conversion_ok && r.conversion_ok;
    report.results.push_back(std::move(r));
  }
  return report;
}

SumTailReport empirical_sum_tail(const BodySpec& body, const Vector& theta, int n_terms,
                                 const std::vector<double>& t_grid, std::size_t trials, RandomStream& rng,
                                 BernsteinVariant variant) {
  if (n_terms < 1 || trials < 1) throw Error(ErrorKind::InvalidArgument, "need n_terms >= 1 and trials >= 1");
  const int n = body.dim();
  const SampleBatch batch = sample_cone_boundary(body, trials * static_cast<std::size_t>(n_terms), rng);
  const auto v = projections(batch.points, theta);
  std::vector<double> sums(trials, 0.0);
  for (std::size_t i = 0; i < trials; ++i)
    for (int k = 0; k < n_terms; ++k) sums[i] += v[i * static_cast<std::size_t>(n_terms) + static_cast<std::size_t>(k)];

  SumTailReport report;
  report.variant = variant;
  report.n_terms = n_terms;
  report.trials = trials;
  if (variant == BernsteinVariant::Psi2) {
    report.R = 3.0 * std::sqrt(static_cast<double>(n)) * theta.lpNorm<Eigen::Infinity>();
  } else {
    std::vector<double> first(trials);
    for (std::size_t i = 0; i < trials; ++i) first[i] = v[i * static_cast<std::size_t>(n_terms)];
    report.R = empirical_orlicz_norm(first, 1, rng, 200).band_high;
  }
  for (double t : t_grid) {
    TailPoint tp;
    tp.t = t;
    std::size_t hits = 0;
    for (double s : sums) hits += std::abs(s) > t * n_terms;
    tp.frequency = static_cast<double>(hits) / static_cast<double>(trials);
    tp.standard_error = binomial_standard_error(tp.frequency, trials);
    tp.bound = bernstein_bound(variant, report.R, t, n_terms);
    tp.pass = tp.frequency <= tp.bound + 4.0 * tp.standard_error;
    report.pass = report.pass && tp.pass;
    report.points.push_back(tp);
  }
  return report;
}

SeriesCertificate certify_l1_psi2(const Vector& theta, int truncation) {
  const int n = static_cast<int>(theta.size());
  const double tinf = theta.lpNorm<Eigen::Infinity>();
  if (!(tinf > 0.0)) throw Error(ErrorKind::InvalidArgument, "theta must be nonzero");
  if (truncation < 1 || truncation > kMaxConeMomentOrder)
    throw Error(ErrorKind::BudgetExceeded, "series truncation limited to q <= " + std::to_string(kMaxConeMomentOrder));

  // m_q / q! for q = 0..truncation.
  std::vector<Rational> coeff;
  for (int q = 0; q <= truncation; ++q) {
    Rational c = cone_moment_linear(theta, q) / factorial(static_cast<unsigned long>(q));
    c.canonicalize();
    coeff.push_back(c);
  }
  const Rational tinf_sq = to_rational(tinf) * to_rational(tinf);
  // Partial sum and remainder at lambda^2 = L, in exact arithmetic.
  auto partial = [&](const Rational& L) {
    Rational s = 0, inv = 1;
    const Rational step = 1 / L;
    for (const auto& c : coeff) {
      s += c * inv;
      inv *= step;
    }
    return s;
  };
  auto remainder = [&](const Rational& L) -> std::optional<Rational> {
    Rational r = 4 * tinf_sq / (n * L);
    if (r >= 1) return std::nullopt;
    Rational rem = rational_power(r, truncation + 1) / (2 * (1 - r));
    rem.canonicalize();
    return rem;
  };
  auto certified_at = [&](const Rational& L) {
    const auto rem = remainder(L);
    return rem && partial(L) + *rem <= 2;
  };

  SeriesCertificate cert;
  cert.n = n;
  cert.truncation = truncation;
  cert.theta_inf = tinf;
  cert.bound = std::sqrt(6.0) * tinf;
  cert.lambda0 = cert.bound / std::sqrt(static_cast<double>(n));
  Rational L0 = 6 * tinf_sq / n;
  L0.canonicalize();
  const Rational S0 = partial(L0);
  const auto R0 = remainder(L0);
  cert.partial_sum = S0.get_d();
  cert.remainder = R0 ? R0->get_d() : std::numeric_limits<double>::infinity();
  cert.certified = R0 && S0 + *R0 <= 2;

  // Smallest certified lambda: bisection on lambda^2 between r = 1 and L0.
  double lo = 4.0 * tinf * tinf / n, hi = L0.get_d();
  if (cert.certified) {
    for (int iter = 0; iter < 60; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (certified_at(to_rational(mid)))
        hi = mid;
      else
        lo = mid;
    }
    cert.lambda_cert = std::sqrt(hi);
  } else {
    cert.lambda_cert = std::numeric_limits<double>::infinity();
  }
  // The partial sum is a lower bound for E exp(.), so it exceeding 2 below
  // lambda_lower shows the exact psi_2 norm is at least lambda_lower.
  lo = 0.0;
  hi = L0.get_d();
  for (int iter = 0; iter < 60 && lo < hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0) break;
    if (partial(to_rational(mid)) > 2)
      lo = mid;
    else
      hi = mid;
  }
  cert.lambda_lower = std::sqrt(lo);
  cert.scaled = std::sqrt(static_cast<double>(n)) * cert.lambda_cert;
  cert.pass = cert.certified && cert.scaled <= cert.bound * (1.0 + 1e-9);
  return cert;
}

}  // namespace conehull
