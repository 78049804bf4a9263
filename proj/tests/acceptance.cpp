// Acceptance checks. Each criterion prints one line:
//   criterion <k> PASS|FAIL <detail> (<seconds> s, budget <seconds> s)
// and the process exits nonzero when any requested criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <CLI11.hpp>

#include "conehull/body.hpp"
#include "conehull/concentration.hpp"
#include "conehull/error.hpp"
#include "conehull/experiment.hpp"
#include "conehull/hull.hpp"
#include "conehull/isotropy.hpp"
#include "conehull/sampling.hpp"
#include "conehull/verification.hpp"

using namespace conehull;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<Vector> gaussian_thetas(int n, int count, RandomStream& rng) {
  std::vector<Vector> out;
  for (int k = 0; k < count; ++k) {
    Vector t(n);
    for (int i = 0; i < n; ++i) {
      // Box-Muller keeps the draw a pure function of the stream
      const double u = uniform01(rng), v = uniform01(rng);
      t(i) = std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
    }
    out.push_back(t);
  }
  return out;
}

// All q in N^n with sum at most `total`.
void compositions(int n, int total, std::vector<int>& q, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(q.size()) == n) {
    out.push_back(q);
    return;
  }
  for (int k = 0; k <= total; ++k) {
    q.push_back(k);
    compositions(n, total - k, q, out);
    q.pop_back();
  }
}

// 2^n times the integral of prod x_i^{2 q_i} over the simplex sum x_i <= 1,
// by nested adaptive Gauss-Kronrod.
double quadrature_moment(const std::vector<int>& q) {
  using boost::math::quadrature::gauss_kronrod;
  const int n = static_cast<int>(q.size());
  std::function<double(int, double)> inner = [&](int i, double remaining) -> double {
    if (i == n) return 1.0;
    auto f = [&](double x) { return std::pow(x, 2 * q[i]) * inner(i + 1, remaining - x); };
    return gauss_kronrod<double, 15>::integrate(f, 0.0, remaining, 3, 1e-12);
  };
  return std::ldexp(inner(0, 1.0), n);
}

Outcome criterion_1() {
  Outcome o;
  double worst = 0.0;
  int cases = 0;
  for (int n = 1; n <= 4; ++n) {
    std::vector<std::vector<int>> qs;
    std::vector<int> q;
    compositions(n, 3, q, qs);
    for (const auto& qq : qs) {
      const double exact = l1_ball_monomial_moment({n, qq}).get_d();
      const double rel = std::abs(quadrature_moment(qq) - exact) / exact;
      worst = std::max(worst, rel);
      ++cases;
      if (rel > 1e-9) o.pass = false;
    }
  }
  bool closed_form = true;
  for (int q = 0; q <= 3; ++q) closed_form = closed_form && l1_ball_monomial_moment({1, {q}}) == Rational(2, 1 + 2 * q);
  o.pass = o.pass && closed_form;
  o.detail = std::to_string(cases) + " moments, worst relative error " + fmt("%.3g", worst) +
             " (tol 1e-9); n=1 equals 2/(1+2q) exactly: " + (closed_form ? "yes" : "no");
  return o;
}

Outcome criterion_2() {
  Outcome o;
  const std::size_t samples = 1000000;
  double worst = 0.0;
  for (int n = 2; n <= 4; ++n) {
    const BodySpec body = BodySpec::cross_polytope(n);
    RandomStream u_rng(kSeed, mix_stream_id(2, n, 1)), c_rng(kSeed, mix_stream_id(2, n, 2));
    const SampleBatch u = sample_uniform(body, samples, u_rng);
    const SampleBatch c = sample_cone_boundary(body, samples, c_rng);
    const Vector e1 = Vector::Unit(n, 0);
    for (int q = 1; q <= 3; ++q) {
      const MomentEstimate r =
          moment_ratio(empirical_abs_moment(u.points, e1, 2.0 * q), empirical_abs_moment(c.points, e1, 2.0 * q));
      const double z = std::abs(r.value - moment_transfer_coefficient(n, 2.0 * q)) / r.standard_error;
      worst = std::max(worst, z);
      if (z > 4.0) o.pass = false;
    }
  }
  o.detail = "9 ratios at 1e6 samples, worst deviation " + fmt("%.2f", worst) + " s.e. (tol 4)";
  return o;
}

Outcome criterion_3() {
  Outcome o;
  struct Named {
    std::string name;
    std::function<BodySpec(int)> make;
  };
  const std::vector<Named> family = {
      {"cross_polytope", [](int n) { return BodySpec::cross_polytope(n); }},
      {"cube", [](int n) { return BodySpec::cube(n); }},
      {"lp_ball_p4", [](int n) { return BodySpec::lp_ball(n, PNorm::finite(4.0)); }},
  };
  double worst_norm = 0.0, worst_tail = -1e9;
  int thetas = 0;
  std::string failures;
  for (std::size_t b = 0; b < family.size(); ++b)
    for (int n = 2; n <= 8; ++n) {
      const BodySpec body = isotropic_normalize(family[b].make(n));
      RandomStream rng(kSeed, mix_stream_id(3, b, n));
      const auto th = gaussian_thetas(n, 10, rng);
      const Psi2Report r = verify_psi2_unconditional(body, th, 100000, rng);
      for (const auto& t : r.results) {
        ++thetas;
        worst_norm = std::max(worst_norm, t.psi2.band_high / t.bound);
        for (const auto& p : t.tails)
          worst_tail = std::max(worst_tail, (p.frequency - p.bound) / std::max(p.standard_error, 1e-300));
      }
      if (!r.pass) {
        o.pass = false;
        failures += " " + family[b].name + "/n=" + std::to_string(n);
      }
    }
  o.detail = std::to_string(thetas) + " thetas, worst upper band / (3 sqrt(n) |theta|_inf) " + fmt("%.3f", worst_norm) +
             ", worst tail excess " + fmt("%.2f", worst_tail) + " s.e. (tol 4)" +
             (failures.empty() ? "" : ", failing:" + failures);
  return o;
}

Outcome criterion_4() {
  Outcome o;
  double worst = 0.0;
  int count = 0;
  for (int n = 1; n <= 8; ++n) {
    RandomStream rng(kSeed, mix_stream_id(4, n));
    for (const Vector& theta : gaussian_thetas(n, 20, rng)) {
      const SeriesCertificate c = certify_l1_psi2(theta);
      ++count;
      worst = std::max(worst, c.scaled / c.bound);
      if (!c.certified || !c.pass) o.pass = false;
    }
  }
  o.detail = std::to_string(count) + " certificates, worst sqrt(n) psi2 / (sqrt 6 |theta|_inf) " + fmt("%.6f", worst) +
             " (tol 1 + 1e-9)";
  return o;
}

Outcome criterion_5() {
  Outcome o;
  RandomStream rng(kSeed, 5);
  for (int n = 2; n <= 6; ++n) {
    // signed, permuted basis plus absorbed interior points
    Matrix g = Matrix::Zero(n, n + 2);
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[uniform_index(rng, i + 1)]);
    for (int i = 0; i < n; ++i) g(perm[i], i) = uniform01(rng) < 0.5 ? -1.0 : 1.0;
    g(0, n) = 0.25;
    g(1, n) = -0.25;
    g.col(n + 1) = Vector::Constant(n, 0.5 / n);
    const SymmetricPolytope p = build_hull(g);
    const Rational volume = polytope_volume_exact(p);
    const Rational expected = l1_ball_monomial_moment({n, std::vector<int>(n, 0)});
    if (volume != expected) o.pass = false;
    if (n <= 4) {
      const auto cov = polytope_covariance_exact(p);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          std::vector<int> q(n, 0);
          q[r] = 1;
          const Rational want = r == c ? l1_ball_monomial_moment({n, q}) : Rational(0);
          if (cov[static_cast<std::size_t>(r * n + c)] != want) o.pass = false;
        }
    }
  }
  o.detail = "B_1^n volumes 2^n/n! exact for n=2..6, second moments exact for n=2..4";
  return o;
}

Outcome criterion_6() {
  Outcome o;
  const int instances = 500;
  const std::vector<std::function<BodySpec(int)>> family = {
      [](int n) { return BodySpec::cross_polytope(n); },
      [](int n) { return BodySpec::cube(n); },
      [](int n) { return BodySpec::lp_ball(n, PNorm::finite(4.0)); },
      [](int n) { return rotated_cube(n, 11); },
  };
  long total = 0, violations = 0, failures = 0;
  double worst_a = 0.0, worst_b = 0.0;
  for (int n = 3; n <= 5; ++n) {
    std::vector<BodySpec> bodies;
    for (const auto& make : family) bodies.push_back(isotropic_normalize(make(n)));
    for (int N : {2 * n, 4 * n}) {
      for (int k = 0; k < instances; ++k) {
        const std::size_t b = static_cast<std::size_t>(k) % bodies.size();
        RandomStream rng(kSeed, mix_stream_id(mix_stream_id(6, n, N), k));
        try {
          const SampleBatch batch = sample_cone_boundary(bodies[b], static_cast<std::size_t>(N), rng);
          HullOptions options;
          options.allow_non_simplicial = b == 1 || b == 3;
          const SymmetricPolytope p = build_hull(batch, options);
          BoundChainOptions chain_options;
          chain_options.l1_mode = L1Mode::Exact;
          const BoundChain c = bound_chain(p, nullptr, chain_options);
          ++total;
          worst_a = std::max(worst_a, c.mean_l1 / c.facet_l1);
          worst_b = std::max(worst_b, c.mean_l2sq / c.facet_l2sq);
          if (c.mean_l1 > c.facet_l1 * (1 + 1e-12) || c.mean_l2sq > c.facet_l2sq * (1 + 1e-12)) ++violations;
        } catch (const Error&) {
          ++failures;
        }
      }
    }
  }
  o.pass = violations == 0 && failures == 0;
  o.detail = std::to_string(total) + " hulls, " + std::to_string(violations) + " violations, " +
             std::to_string(failures) + " failed builds; worst ratios (a) " + fmt("%.4f", worst_a) + " (b) " +
             fmt("%.4f", worst_b);
  return o;
}

Outcome criterion_7() {
  Outcome o;
  ExperimentConfig c = ExperimentConfig::from_json(
      {{"experiment", "volume_radius"},
       {"bodies", json::array({{{"kind", "cross_polytope"}}, {{"kind", "cube"}}})},
       {"dims", {3, 4}},
       {"n_schedule", {"2n", "4n"}},
       {"trials", 1000},
       {"master_seed", kSeed},
       {"workers", 0}});
  const VolumeRadiusReport r = run_volume_radius_check(c);
  long rows = 0, inclusion = 0, coupling = 0, failed = 0;
  for (const auto& row : r.rows) {
    ++rows;
    if (!row.ok) {
      ++failed;
      continue;
    }
    inclusion += row.inclusion;
    coupling += row.coupling;
  }
  o.pass = failed == 0 && inclusion == rows && coupling == rows;
  o.detail = std::to_string(rows) + " coupled hulls (1000 trials per body, n, N): inclusion " +
             std::to_string(inclusion) + ", volume order " + std::to_string(coupling) + ", failed " +
             std::to_string(failed);
  return o;
}

Outcome criterion_8() {
  Outcome o;
  auto run = [&](const std::string& kind, json bodies) {
    ExperimentConfig c = ExperimentConfig::from_json({{"experiment", kind},
                                                      {"bodies", bodies},
                                                      {"dims", {4, 5, 6, 7, 8}},
                                                      {"n_schedule", {"2n", "4n", "8n"}},
                                                      {"trials", 200},
                                                      {"master_seed", kSeed},
                                                      {"l1_mode", "mc"},
                                                      {"l1_samples", 2000},
                                                      {"bootstrap_resamples", 1000},
                                                      {"workers", 0}});
    return kind == "unconditional" ? run_unconditional_experiment(c) : run_general_experiment(c);
  };
  const ExperimentReport u = run("unconditional", json::array({{{"kind", "cross_polytope"}},
                                                               {{"kind", "cube"}},
                                                               {{"kind", "lp_ball"}, {"p", 4}}}));
  const ExperimentReport g = run("general", json::array({{{"kind", "rotated_cube"}, {"rotation_seed", 11}}}));
  int bands = 0, passed = 0, q99_passed = 0;
  std::ostringstream detail;
  for (const ExperimentReport* r : {&u, &g})
    for (const auto& t : r->summary["trends"]) {
      ++bands;
      const bool ok = t["median_band_pass"].get<bool>();
      passed += ok;
      q99_passed += t["q99_band_pass"].get<bool>();
      if (!ok)
        detail << ' ' << t["body"].get<std::string>() << "/n=" << t["n"].get<int>() << " band ["
               << fmt("%.4f", t["median_slope"]["low"].get<double>()) << ", "
               << fmt("%.4f", t["median_slope"]["high"].get<double>()) << "]";
    }
  int bad_cells = 0;
  for (const ExperimentReport* r : {&u, &g})
    for (const auto& cell : r->summary["cells"]) bad_cells += !cell["pass"].get<bool>();
  o.pass = passed == bands && bad_cells == 0;
  o.detail = std::to_string(passed) + "/" + std::to_string(bands) + " median-slope bands reach 0 or below (q99: " +
             std::to_string(q99_passed) + "/" + std::to_string(bands) + "), " + std::to_string(bad_cells) +
             " failing cells, max L " + fmt("%.4f", u.summary["max_l"].get<double>()) +
             (detail.str().empty() ? "" : "; rising:" + detail.str());
  return o;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion_9() {
  Outcome o;
  std::vector<std::string> mismatches;
  auto experiment = [](const std::string& kind, json bodies, unsigned workers, const std::string& csv) {
    ExperimentConfig c = ExperimentConfig::from_json({{"experiment", kind},
                                                      {"bodies", bodies},
                                                      {"dims", {3, 4}},
                                                      {"n_schedule", {"2n", "4n"}},
                                                      {"trials", 20},
                                                      {"master_seed", kSeed},
                                                      {"subset_max", true},
                                                      {"subset_budget", 500},
                                                      {"cross_validate_trials", 2},
                                                      {"bootstrap_resamples", 200}});
    c.workers = workers;
    c.csv_path = csv;
    std::ostringstream log;
    run_configured(c, log);
    return slurp(csv);
  };
  const json unconditional = json::array({{{"kind", "cross_polytope"}}, {{"kind", "lp_ball"}, {"p", 4}}});
  const json general = json::array({{{"kind", "rotated_cube"}, {"rotation_seed", 3}}});
  const json volume = json::array({{{"kind", "cube"}}});
  std::size_t bytes = 0;
  for (const auto& [kind, bodies] : {std::pair{std::string("unconditional"), unconditional},
                                     std::pair{std::string("general"), general},
                                     std::pair{std::string("volume_radius"), volume}}) {
    const std::string a = experiment(kind, bodies, 1, "determinism_" + kind + "_w1.csv");
    const std::string b = experiment(kind, bodies, 3, "determinism_" + kind + "_w3.csv");
    const std::string c = experiment(kind, bodies, 1, "determinism_" + kind + "_rerun.csv");
    bytes += a.size();
    if (a.empty() || a != b || a != c) mismatches.push_back(kind);
  }
  VerificationConfig v;
  v.master_seed = kSeed;
  v.sample_count = 10000;
  v.dims = {2, 4};
  v.random_thetas = 1;
  v.polytopes = 4;
  v.resamples = 50;
  v.workers = 1;
  const std::string va = run_verification_suite(v).to_json().dump(2);
  v.workers = 3;
  const std::string vb = run_verification_suite(v).to_json().dump(2);
  if (va != vb) mismatches.push_back("verify");
  bytes += va.size();
  o.pass = mismatches.empty();
  std::string which;
  for (const auto& m : mismatches) which += " " + m;
  o.detail = "experiment, general, volume-radius CSVs and verify report at 1 and 3 workers plus a rerun, " +
             std::to_string(bytes) + " bytes compared" + (which.empty() ? ", all identical" : ", differing:" + which);
  return o;
}

struct Criterion {
  std::function<Outcome()> run;
  double budget_seconds;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion numbers to run (default: all)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  const std::vector<Criterion> criteria = {
      {criterion_1, 60},  {criterion_2, 300}, {criterion_3, 600},  {criterion_4, 60},  {criterion_5, 120},
      {criterion_6, 600}, {criterion_7, 300}, {criterion_8, 3600}, {criterion_9, 1200},
  };
  bool all = true;
  for (int k : selected) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(k - 1)].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double budget = criteria[static_cast<std::size_t>(k - 1)].budget_seconds;
    const bool in_time = seconds <= budget;
    const bool pass = o.pass && in_time;
    all = all && pass;
    std::cout << "criterion " << k << ' ' << (pass ? "PASS" : "FAIL") << ' ' << o.detail << " ("
              << fmt("%.1f", seconds) << " s, budget " << fmt("%.0f", budget) << " s"
              << (in_time ? "" : ", over budget") << ")" << std::endl;
  }
  return all ? 0 : 1;
}
