#include "conehull/verification.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "conehull/body.hpp"
#include "conehull/concentration.hpp"
#include "conehull/error.hpp"
#include "conehull/hull.hpp"
#include "conehull/isotropy.hpp"
#include "conehull/parallel.hpp"
#include "conehull/sampling.hpp"

namespace conehull {

namespace {

constexpr std::uint64_t kVerifyTag = 0x766572696679ULL;
constexpr double kZ95 = 1.959963984540054;

using Checks = std::vector<CheckResult>;
using Task = std::function<Checks(RandomStream&)>;

CheckResult make_check(std::string check, std::string body, int n, bool hard) {
  CheckResult r;
  r.check = std::move(check);
  r.body = std::move(body);
  r.n = n;
  r.hard = hard;
  return r;
}

Vector unit(int n, int i) { return Vector::Unit(n, i); }

std::vector<Vector> test_thetas(int n, int random, RandomStream& rng) {
  std::vector<Vector> out = {unit(n, 0), Vector::Ones(n)};
  std::normal_distribution<double> gauss;
  for (int k = 0; k < random; ++k) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = gauss(rng);
    out.push_back(v / v.norm());
  }
  return out;
}

nlohmann::json theta_json(const Vector& theta) { return std::vector<double>(theta.data(), theta.data() + theta.size()); }

double band_se(const OrliczEstimate& e) { return (e.band_high - e.band_low) / (2.0 * kZ95); }

struct NamedBody {
  std::string name;
  BodySpec body;
};

NamedBody iso(const std::string& name, int n) {
  if (name == "cross_polytope") return {name, isotropic_normalize(BodySpec::cross_polytope(n))};
  if (name == "cube") return {name, isotropic_normalize(BodySpec::cube(n))};
  if (name == "lp_ball_p4") return {name, isotropic_normalize(BodySpec::lp_ball(n, PNorm::finite(4.0)))};
  if (name == "rotated_cube") return {name, rotated_cube(n, 11)};
  throw Error(ErrorKind::InvalidArgument, "unknown test body " + name);
}

// ---------------------------------------------------------------------------
// Geometry

Checks cross_polytope_checks() {
  Checks out;
  for (int n = 2; n <= 6; ++n) {
    const SymmetricPolytope p = build_hull(Matrix::Identity(n, n));
    const Rational volume = polytope_volume_exact(p);
    const Rational want = Rational(1L << n) / factorial(static_cast<unsigned long>(n));
    auto r = make_check("hull.cross_polytope_volume", "cross_polytope", n, true);
    r.empirical = volume.get_d();
    r.bound = want.get_d();
    r.pass = volume == want;
    r.params = {{"path", "rational"}};
    out.push_back(r);
    if (n > 4) continue;
    const auto cov = polytope_covariance_exact(p);
    MomentSpec spec{n, std::vector<int>(static_cast<std::size_t>(n), 0)};
    spec.q[0] = 1;
    const Rational diag = l1_ball_monomial_moment(spec);
    bool exact_ok = true;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) exact_ok = exact_ok && cov[static_cast<std::size_t>(i) * n + j] == (i == j ? diag : Rational(0));
    auto c = make_check("hull.cross_polytope_covariance", "cross_polytope", n, true);
    c.empirical = cov[0].get_d();
    c.bound = diag.get_d();
    c.pass = exact_ok;
    c.params = {{"path", "rational"}, {"entry", "int x_1^2"}};
    out.push_back(c);
    // Floating path: a coordinate-permutation-invariant input gives a
    // multiple of the identity.
    const Matrix fc = polytope_covariance(p);
    const double dev = (fc - fc(0, 0) * Matrix::Identity(n, n)).cwiseAbs().maxCoeff() / fc(0, 0);
    auto s = make_check("hull.covariance_multiple_of_identity", "cross_polytope", n, true);
    s.empirical = dev;
    s.bound = 1e-9;
    s.pass = dev <= 1e-9;
    out.push_back(s);
  }
  return out;
}

// Inequalities that must hold on every built K_N.
Checks random_hull_checks(const NamedBody& nb, std::size_t N, int instances, RandomStream& rng) {
  const int n = nb.body.dim();
  double worst_l1 = 0.0, worst_l2 = 0.0, worst_l = 0.0, worst_sym = 0.0, worst_scale = 0.0;
  double worst_growth = std::numeric_limits<double>::infinity();
  int monotone_cases = 0;
  bool monotone = true;
  HullOptions options;
  options.allow_non_simplicial = nb.name != "lp_ball_p4";
  BoundChainOptions chain_options;
  chain_options.l1_mode = L1Mode::Exact;
  for (int k = 0; k < instances; ++k) {
    const SampleBatch batch = sample_cone_boundary(nb.body, N + 1, rng);
    const Matrix x = batch.points.leftCols(static_cast<Eigen::Index>(N));
    const SymmetricPolytope p = build_hull(x, options);
    const BoundChain b = bound_chain(p, &rng, chain_options);
    worst_l1 = std::max(worst_l1, b.mean_l1 / b.facet_l1);
    worst_l2 = std::max(worst_l2, b.mean_l2sq / b.facet_l2sq);
    worst_l = std::max(worst_l, b.l_exact / b.l2_bound);
    const Matrix& m = p.second_moment;
    worst_sym = std::max(worst_sym, (m - m.transpose()).cwiseAbs().maxCoeff() / m.cwiseAbs().maxCoeff());
    if (k < 3) {
      for (double r : {0.5, 3.0}) {
        const double lr = isotropic_constant_polytope(build_hull(r * x, options));
        worst_scale = std::max(worst_scale, std::abs(lr / b.l_exact - 1.0));
      }
      const SymmetricPolytope grown = build_hull(batch.points, options);
      const Rational before = polytope_volume_exact(p);
      const Rational after = polytope_volume_exact(grown);
      monotone = monotone && after >= before;
      worst_growth = std::min(worst_growth, Rational(after / before).get_d());
      ++monotone_cases;
    }
  }
  const nlohmann::json params = {{"N", N}, {"instances", instances}, {"l1_integral", "exact"}};
  auto add = [&](const std::string& name, double empirical, double bound, bool pass, nlohmann::json extra = {}) {
    auto r = make_check(name, nb.name, n, true);
    r.empirical = empirical;
    r.bound = bound;
    r.pass = pass;
    r.params = params;
    if (!extra.is_null()) r.params.update(extra);
    return r;
  };
  return {
      add("hull.facet_l1_inequality", worst_l1, 1.0, worst_l1 <= 1.0 + 1e-12, {{"statistic", "max mean_l1 / facet_l1"}}),
      add("hull.facet_l2sq_inequality", worst_l2, 1.0, worst_l2 <= 1.0 + 1e-12,
          {{"statistic", "max mean_l2sq / facet_l2sq"}}),
      add("hull.covariance_symmetric", worst_sym, 1e-12, worst_sym <= 1e-12),
      add("hull.inclusion_monotone", worst_growth, 1.0, monotone,
          {{"statistic", "min exact volume ratio after adding a generator"}, {"cases", monotone_cases}}),
      add("isotropy.l_exact_le_l2_bound", worst_l, 1.0, worst_l <= 1.0 + 1e-12, {{"statistic", "max l_exact / l2_bound"}}),
      add("isotropy.scaling_invariance", worst_scale, 1e-10, worst_scale <= 1e-10,
          {{"statistic", "max relative change of L under x -> r x"}, {"r", {0.5, 3.0}}}),
  };
}

Checks subset_checks(const NamedBody& nb, std::size_t N, int instances, RandomStream& rng) {
  const int n = nb.body.dim();
  HullOptions options;
  options.allow_non_simplicial = true;
  double worst_l1 = std::numeric_limits<double>::infinity(), worst_l2 = worst_l1;
  for (int k = 0; k < instances; ++k) {
    const SampleBatch batch = sample_cone_boundary(nb.body, N, rng);
    const SymmetricPolytope p = build_hull(batch, options);
    const SubsetMax s1 = max_subset_sign_sum(batch.points, SubsetNorm::L1, 1, rng, SubsetMode::Exhaustive);
    const SubsetMax s2 = max_subset_sign_sum(batch.points, SubsetNorm::L2, 1, rng, SubsetMode::Exhaustive);
    worst_l1 = std::min(worst_l1, s1.value / facet_sign_sum_max(p, SignNorm::L1));
    worst_l2 = std::min(worst_l2, s2.value * s2.value / facet_sign_sum_max(p, SignNorm::L2Squared));
  }
  Checks out;
  for (auto [norm, worst] : {std::pair{"l1", worst_l1}, std::pair{"l2sq", worst_l2}}) {
    auto r = make_check("isotropy.subset_dominates_facet", nb.name, n, true);
    r.empirical = worst;
    r.bound = 1.0;
    r.pass = worst >= 1.0 - 1e-12;
    r.params = {{"N", N}, {"instances", instances}, {"norm", norm}, {"statistic", "min subset max / facet max"}};
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Concentration

Checks certificate_checks(const VerificationConfig& config, RandomStream& rng) {
  Checks out;
  for (int n = 2; n <= 8; ++n) {
    for (const Vector& theta : test_thetas(n, config.random_thetas, rng)) {
      const SeriesCertificate c = certify_l1_psi2(theta);
      auto r = make_check("concentration.series_certificate", "cross_polytope", n, true);
      r.empirical = c.scaled;
      r.bound = c.bound * (1.0 + 1e-9);
      r.pass = c.pass;
      r.params = {{"theta", theta_json(theta)}, {"truncation", c.truncation},
                  {"partial_sum_at_lambda0", c.partial_sum}, {"remainder_at_lambda0", c.remainder},
                  {"lambda_lower", c.lambda_lower}};
      out.push_back(r);
    }
  }
  return out;
}

CheckResult residual_check(const std::string& body, int n, double worst) {
  auto r = make_check("concentration.luxemburg_residual", body, n, true);
  r.empirical = worst;
  r.bound = 1e-6;
  r.pass = worst <= 1e-6;
  return r;
}

Checks psi2_checks(const VerificationConfig& config, const NamedBody& nb, RandomStream& rng) {
  const int n = nb.body.dim();
  Psi2Options options;
  options.psi2_constant = config.psi2_constant;
  options.resamples = config.resamples;
  const auto thetas = test_thetas(n, config.random_thetas, rng);
  const Psi2Report report = verify_psi2_unconditional(nb.body, thetas, config.sample_count, rng, options);
  Checks out;
  double residual = 0.0;
  for (const auto& t : report.results) {
    auto r = make_check("concentration.psi2_bound", nb.name, n, false);
    r.empirical = t.psi2.band_high;
    r.bound = t.bound;
    r.standard_error = band_se(t.psi2);
    r.pass = t.pass;
    nlohmann::json tails = nlohmann::json::array();
    for (const auto& p : t.tails)
      tails.push_back({{"t", p.t}, {"frequency", p.frequency}, {"se", p.standard_error}, {"bound", p.bound},
                       {"pass", p.pass}});
    r.params = {{"theta", theta_json(t.theta)}, {"psi2", t.psi2.value}, {"psi2_constant", config.psi2_constant},
                {"samples", config.sample_count}, {"tails", tails}};
    out.push_back(r);
    residual = std::max(residual, std::abs(t.psi2.residual));
  }
  out.push_back(residual_check(nb.name, n, residual));
  return out;
}

Checks psi1_checks(const VerificationConfig& config, const NamedBody& nb, RandomStream& rng) {
  const int n = nb.body.dim();
  const auto thetas = test_thetas(n, config.random_thetas, rng);
  const Psi1Report report = verify_psi1_general(nb.body, thetas, config.sample_count, rng, config.resamples);
  auto r = make_check("concentration.psi1_conversion", nb.name, n, false);
  r.empirical = report.max_ratio;
  r.pass = report.conversion_ok;
  r.params = {{"statistic", "max psi1 upper band / L_K"}, {"isotropic_constant", report.isotropic_constant},
              {"samples", config.sample_count}};
  double residual = 0.0;
  for (const auto& t : report.results)
    residual = std::max({residual, std::abs(t.psi1.residual), std::abs(t.psi2.residual)});
  return {r, residual_check(nb.name, n, residual)};
}

Checks comparison_checks(const VerificationConfig& config, const NamedBody& nb, RandomStream& rng) {
  const int n = nb.body.dim();
  const SampleBatch batch = sample_cone_boundary(nb.body, config.sample_count, rng);
  // V = (sqrt 6 / 2) n B_1^n, so c^2 = 3 n^2 / 2.
  const Rational c2 = Rational(3 * n * n, 2);
  Checks out;
  for (const Vector& theta : {unit(n, 0), Vector(Vector::Ones(n))}) {
    for (int q = 1; q <= 3; ++q) {
      const MomentEstimate mc = empirical_abs_moment(batch.points, theta, 2.0 * q);
      const double exact = scaled_cone_moment_linear(theta, q, c2).get_d();
      auto r = make_check("concentration.comparison_moment", nb.name, n, false);
      r.empirical = mc.value;
      r.bound = exact;
      r.standard_error = mc.standard_error;
      r.pass = mc.value - 4.0 * mc.standard_error <= exact;
      r.params = {{"theta", theta_json(theta)}, {"q", q}, {"samples", config.sample_count}};
      out.push_back(r);
    }
  }
  return out;
}

Checks scaling_lemma_checks(const VerificationConfig& config, int n, RandomStream& rng) {
  const BodySpec base = BodySpec::cross_polytope(n);
  const SampleBatch ref = sample_cone_boundary(base, config.sample_count, rng);
  Checks out;
  for (double c : {0.5, 3.0}) {
    const SampleBatch scaled = sample_cone_boundary(BodySpec::scaled_l1(n, c), config.sample_count, rng);
    for (const Vector& theta : {unit(n, 0), Vector(Vector::Ones(n))}) {
      const OrliczEstimate a = empirical_orlicz_norm(projections(ref.points, theta), 2, rng, config.resamples);
      const OrliczEstimate b = empirical_orlicz_norm(projections(scaled.points, theta), 2, rng, config.resamples);
      const double ratio = b.value / a.value;
      const double rse = std::hypot(band_se(a) / a.value, band_se(b) / b.value);
      auto r = make_check("concentration.scaling_lemma", "scaled_l1", n, false);
      r.empirical = ratio / c;
      r.bound = 1.0;
      r.standard_error = rse;
      r.pass = std::abs(ratio / c - 1.0) <= 2.0 * rse;
      r.params = {{"c", c}, {"theta", theta_json(theta)}, {"statistic", "psi2(cB) / (c psi2(B))"},
                  {"samples", config.sample_count}};
      out.push_back(r);
    }
  }
  return out;
}

Checks transfer_checks(const VerificationConfig& config, const NamedBody& nb, RandomStream& rng) {
  const int n = nb.body.dim();
  const SampleBatch uniform = sample_uniform(nb.body, config.sample_count, rng);
  const SampleBatch cone = sample_cone_boundary(nb.body, config.sample_count, rng);
  const Vector theta = unit(n, 0);
  Checks out;
  for (int p : {2, 4, 6}) {
    const MomentEstimate ratio = moment_ratio(empirical_abs_moment(uniform.points, theta, p),
                                              empirical_abs_moment(cone.points, theta, p));
    const double want = moment_transfer_coefficient(n, p);
    auto r = make_check("concentration.transfer_identity", nb.name, n, false);
    r.empirical = ratio.value;
    r.bound = want;
    r.standard_error = ratio.standard_error;
    r.pass = std::abs(ratio.value - want) <= 4.0 * ratio.standard_error;
    r.params = {{"p", p}, {"theta", theta_json(theta)}, {"samples", config.sample_count},
                {"mc_approximate", uniform.mc_approximate}};
    out.push_back(r);
  }
  return out;
}

Checks sum_tail_checks(const VerificationConfig& config, const NamedBody& nb, BernsteinVariant variant,
                       RandomStream& rng) {
  const int n = nb.body.dim();
  const Vector theta = Vector::Ones(n);
  const std::size_t trials = std::max<std::size_t>(config.sample_count / static_cast<std::size_t>(n), 10);
  const std::vector<double> grid = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
  const SumTailReport report = empirical_sum_tail(nb.body, theta, n, grid, trials, rng, variant);
  auto r = make_check(variant == BernsteinVariant::Psi2 ? "concentration.sum_tail_psi2" : "concentration.sum_tail_psi1",
                      nb.name, n, false);
  double worst = -std::numeric_limits<double>::infinity();
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : report.points) {
    worst = std::max(worst, (p.frequency - p.bound) / std::max(p.standard_error, 1e-300));
    points.push_back({{"t", p.t}, {"frequency", p.frequency}, {"se", p.standard_error}, {"bound", p.bound}});
  }
  r.empirical = worst;
  r.bound = 4.0;
  r.pass = report.pass;
  r.params = {{"statistic", "max (frequency - bound) / se"}, {"R", report.R}, {"terms", n}, {"trials", trials},
              {"points", points}};
  return {r};
}

}  // namespace

// ---------------------------------------------------------------------------

VerificationConfig VerificationConfig::from_json(const nlohmann::json& doc) {
  static const std::set<std::string> known = {"master_seed", "sample_count", "dims",          "random_thetas",
                                              "resamples",   "polytopes",    "psi2_constant", "workers"};
  VerificationConfig c;
  try {
    if (!doc.is_object()) throw Error(ErrorKind::ConfigError, "config must be a JSON object");
    for (const auto& [key, value] : doc.items())
      if (!known.count(key)) throw Error(ErrorKind::ConfigError, "unknown config key '" + key + "'");
    c.master_seed = doc.value("master_seed", c.master_seed);
    c.sample_count = doc.value("sample_count", c.sample_count);
    c.dims = doc.value("dims", c.dims);
    c.random_thetas = doc.value("random_thetas", c.random_thetas);
    c.resamples = doc.value("resamples", c.resamples);
    c.polytopes = doc.value("polytopes", c.polytopes);
    c.psi2_constant = doc.value("psi2_constant", c.psi2_constant);
    c.workers = doc.value("workers", c.workers);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  if (c.sample_count < 10) throw Error(ErrorKind::ConfigError, "sample_count must be at least 10");
  if (c.dims.empty()) throw Error(ErrorKind::ConfigError, "no dims");
  for (int n : c.dims)
    if (n < 2 || n > kMaxConeMomentDim)
      throw Error(ErrorKind::ConfigError, "dims must lie in [2, " + std::to_string(kMaxConeMomentDim) + "]");
  if (c.random_thetas < 0 || c.resamples < 1 || c.polytopes < 1 || !(c.psi2_constant > 0.0))
    throw Error(ErrorKind::ConfigError, "random_thetas, resamples, polytopes and psi2_constant must be positive");
  return c;
}

nlohmann::json VerificationConfig::to_json() const {
  return {{"master_seed", master_seed}, {"sample_count", sample_count}, {"dims", dims},
          {"random_thetas", random_thetas}, {"resamples", resamples}, {"polytopes", polytopes},
          {"psi2_constant", psi2_constant}};
}

nlohmann::json CheckResult::to_json() const {
  return {{"check", check},           {"body", body}, {"n", n},       {"params", params},
          {"empirical", empirical},   {"bound", bound}, {"pass", pass}, {"se", standard_error},
          {"status", status},         {"hard", hard}};
}

std::size_t VerificationReport::hard_failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return c.hard && !c.pass; }));
}

std::size_t VerificationReport::statistical_failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == "fail" && !c.hard; }));
}

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  std::size_t widened = 0;
  for (const auto& c : checks) {
    list.push_back(c.to_json());
    widened += c.status == "widened-band";
  }
  return {{"config", config.to_json()},
          {"checks", list},
          {"summary",
           {{"total", checks.size()},
            {"hard_failures", hard_failures()},
            {"statistical_failures", statistical_failures()},
            {"widened_band", widened},
            {"pass", hard_failures() == 0}}}};
}

int VerificationReport::exit_code() const { return hard_failures() == 0 ? 0 : 1; }

VerificationReport run_verification_suite(const VerificationConfig& config) {
  std::vector<Task> tasks;
  tasks.push_back([](RandomStream&) { return cross_polytope_checks(); });
  for (const char* name : {"cross_polytope", "cube", "rotated_cube"})
    for (int n = 3; n <= 5; ++n)
      for (int k : {2, 4}) {
        tasks.push_back([=, &config](RandomStream& rng) {
          return random_hull_checks(iso(name, n), static_cast<std::size_t>(k * n), config.polytopes, rng);
        });
      }
  for (const char* name : {"cross_polytope", "cube"})
    for (auto [n, N] : {std::pair{3, 4}, std::pair{3, 6}, std::pair{4, 5}, std::pair{4, 8}})
      tasks.push_back([=, &config](RandomStream& rng) {
        return subset_checks(iso(name, n), static_cast<std::size_t>(N), std::max(1, config.polytopes / 4), rng);
      });
  tasks.push_back([&](RandomStream& rng) { return certificate_checks(config, rng); });
  for (int n : config.dims) {
    for (const char* name : {"cross_polytope", "cube", "lp_ball_p4"}) {
      tasks.push_back([=, &config](RandomStream& rng) { return psi2_checks(config, iso(name, n), rng); });
      tasks.push_back([=, &config](RandomStream& rng) { return comparison_checks(config, iso(name, n), rng); });
    }
    for (const char* name : {"cross_polytope", "cube", "rotated_cube"}) {
      tasks.push_back([=, &config](RandomStream& rng) { return psi1_checks(config, iso(name, n), rng); });
      tasks.push_back([=, &config](RandomStream& rng) { return transfer_checks(config, iso(name, n), rng); });
    }
    tasks.push_back([=, &config](RandomStream& rng) { return scaling_lemma_checks(config, n, rng); });
    tasks.push_back([=, &config](RandomStream& rng) {
      return sum_tail_checks(config, iso("cube", n), BernsteinVariant::Psi2, rng);
    });
    tasks.push_back([=, &config](RandomStream& rng) {
      return sum_tail_checks(config, iso("rotated_cube", n), BernsteinVariant::Psi1, rng);
    });
  }

  std::vector<Checks> results(tasks.size());
  parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
    RandomStream rng(config.master_seed, mix_stream_id(kVerifyTag, i));
    results[i] = tasks[i](rng);
  });

  VerificationReport report;
  report.config = config;
  const bool reduced = config.sample_count < kFullScaleSamples;
  for (auto& group : results)
    for (auto& c : group) {
      if (c.hard || !reduced)
        c.status = c.pass ? "pass" : "fail";
      else
        c.status = "widened-band";
      report.checks.push_back(std::move(c));
    }

  // psi_1 / L_K should stay bounded over the family: the worst ratio at the
  // largest n may not exceed 1.5 times the worst ratio at the smallest n.
  const int lo = *std::min_element(config.dims.begin(), config.dims.end());
  const int hi = *std::max_element(config.dims.begin(), config.dims.end());
  double at_lo = 0.0, at_hi = 0.0;
  for (const auto& c : report.checks) {
    if (c.check != "concentration.psi1_conversion") continue;
    if (c.n == lo) at_lo = std::max(at_lo, c.empirical);
    if (c.n == hi) at_hi = std::max(at_hi, c.empirical);
  }
  auto r = make_check("concentration.psi1_family_bounded", "family", hi, false);
  r.empirical = at_hi;
  r.bound = 1.5 * at_lo;
  r.pass = at_hi <= 1.5 * at_lo;
  r.params = {{"statistic", "max psi1 upper band / L_K at the largest n"}, {"smallest_n", lo}};
  r.status = reduced ? "widened-band" : (r.pass ? "pass" : "fail");
  report.checks.push_back(r);
  return report;
}

}  // namespace conehull
