#include <doctest.h>

#include <cmath>

#include "conehull/body.hpp"
#include "conehull/concentration.hpp"
#include "conehull/error.hpp"
#include "conehull/sampling.hpp"

using namespace conehull;

TEST_CASE("monomial moments of B_1^n") {
  CHECK(l1_ball_monomial_moment({1, {1}}) == Rational(2, 3));
  CHECK(l1_ball_monomial_moment({2, {1, 0}}) == Rational(1, 3));
  CHECK(l1_ball_monomial_moment({2, {0, 0}}) == 2);
  CHECK(l1_ball_monomial_moment({3, {0, 0, 0}}) == Rational(4, 3));
  for (int q = 0; q <= 6; ++q) CHECK(l1_ball_monomial_moment({1, {q}}) == Rational(2, 1 + 2 * q));
  CHECK(MomentSpec{3, {1, 2, 0}}.total_q() == 3);
}

TEST_CASE("transfer coefficient") {
  CHECK(moment_transfer_coefficient(2, 2.0) == doctest::Approx(0.5));
  CHECK(moment_transfer_coefficient_exact(2, 2) == Rational(1, 2));
  CHECK(moment_transfer_coefficient_exact(5, 4) == Rational(5, 9));
  CHECK(moment_transfer_coefficient(7, 1e-12) == doctest::Approx(1.0));
}

TEST_CASE("transfer coefficient by Monte Carlo on B_1^2") {
  const BodySpec body = BodySpec::cross_polytope(2);
  RandomStream a(1, 1), b(1, 2);
  const SampleBatch u = sample_uniform(body, 200000, a);
  const SampleBatch c = sample_cone_boundary(body, 200000, b);
  const Vector e1 = Vector::Unit(2, 0);
  const MomentEstimate num = empirical_abs_moment(u.points, e1, 2.0);
  const MomentEstimate den = empirical_abs_moment(c.points, e1, 2.0);
  CHECK(std::abs(num.value - 1.0 / 6.0) <= 4 * num.standard_error);
  CHECK(std::abs(den.value - 1.0 / 3.0) <= 4 * den.standard_error);
  const MomentEstimate r = moment_ratio(num, den);
  CHECK(std::abs(r.value - 0.5) <= 4 * r.standard_error);
}

TEST_CASE("cone moments of linear functionals") {
  CHECK(cone_moment_linear(Vector::Unit(2, 0), 1) == Rational(1, 3));
  CHECK(cone_moment_linear(Vector::Ones(2), 1) == Rational(2, 3));
  CHECK(cone_moment_linear(Vector::Zero(4), 2) == 0);
  CHECK(cone_moment_linear(Vector::Zero(4), 0) == 1);
  CHECK(cone_moment_linear(2, {Rational(1), Rational(1)}, 1) == Rational(2, 3));
  CHECK_THROWS_AS(cone_moment_linear(Vector::Ones(3), kMaxConeMomentOrder + 1), Error);
  CHECK_THROWS_AS(cone_moment_linear(Vector::Ones(kMaxConeMomentDim + 1), 1), Error);

  RandomStream rng(2, 2);
  const SampleBatch c = sample_cone_boundary(BodySpec::cross_polytope(2), 1000000, rng);
  const MomentEstimate m = empirical_abs_moment(c.points, Vector::Ones(2), 2.0);
  CHECK(std::abs(m.value - 2.0 / 3.0) <= 4 * m.standard_error);

  // scaled boundary: moments scale by c^{2q}
  CHECK(scaled_cone_moment_linear(Vector::Unit(2, 0), 2, Rational(9)) == 81 * cone_moment_linear(Vector::Unit(2, 0), 2));
}

TEST_CASE("Orlicz norms of constants have closed forms") {
  const std::vector<double> v(100, 1.5);
  const OrliczEstimate two = empirical_orlicz_norm(v, 2);
  CHECK(two.value == doctest::Approx(1.5 / std::sqrt(std::log(2.0))).epsilon(1e-6));
  CHECK(1.0 / std::sqrt(std::log(2.0)) == doctest::Approx(1.2011).epsilon(1e-4));
  const OrliczEstimate one = empirical_orlicz_norm(v, 1);
  CHECK(one.value == doctest::Approx(1.5 / std::log(2.0)).epsilon(1e-6));
  CHECK(one.alpha == 1);
  CHECK(one.sample_count == 100);
}

TEST_CASE("Orlicz estimate solves its defining equation and is homogeneous") {
  RandomStream rng(3, 3);
  std::vector<double> v(5000);
  for (auto& x : v) x = uniform01(rng) - 0.3;
  for (int alpha : {1, 2}) {
    const OrliczEstimate e = empirical_orlicz_norm(v, alpha);
    CHECK(std::abs(e.residual) <= 1e-6);
    CHECK(e.bisection_tolerance <= 1e-6);
    CHECK(e.bracket_low <= e.value);
    CHECK(e.value <= e.bracket_high);
    double m = 0.0;
    for (double x : v) m += std::exp(std::pow(std::abs(x) / e.value, alpha));
    CHECK(std::abs(m / v.size() - 2.0) <= 1e-6);
    std::vector<double> doubled = v;
    for (auto& x : doubled) x *= 2;
    CHECK(empirical_orlicz_norm(doubled, alpha).value == doctest::Approx(2 * e.value).epsilon(1e-6));
  }
  RandomStream b(4, 4);
  const OrliczEstimate band = empirical_orlicz_norm(v, 2, b, 100);
  CHECK(band.resamples == 100);
  CHECK(band.band_low <= band.value);
  CHECK(band.value <= band.band_high);
}

TEST_CASE("Orlicz errors") {
  CHECK_THROWS_AS(empirical_orlicz_norm(std::vector<double>(5, 0.0), 2), Error);
  CHECK_THROWS_AS(empirical_orlicz_norm({}, 2), Error);
  CHECK_THROWS_AS(empirical_orlicz_norm({1.0}, 3), Error);
  try {
    empirical_orlicz_norm(std::vector<double>(5, 0.0), 1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Degenerate);
  }
}

TEST_CASE("Bernstein bounds") {
  CHECK(bernstein_bound(BernsteinVariant::Psi2, 1, 1, 8) == doctest::Approx(2 * std::exp(-1.0)));
  CHECK(bernstein_bound(BernsteinVariant::Psi2, 1, 1, 8) == doctest::Approx(0.7358).epsilon(1e-4));
  CHECK(bernstein_bound(BernsteinVariant::Psi1, 1, 2, 6) == doctest::Approx(0.2707).epsilon(1e-4));
  CHECK(bernstein_bound(BernsteinVariant::Psi1, 2, 1, 6) == doctest::Approx(2 * std::exp(-0.5 * 0.5)));
  CHECK(bernstein_bound(BernsteinVariant::Psi2, 1, 1e-9, 3) == doctest::Approx(2.0));
  CHECK(bernstein_bound_reported(BernsteinVariant::Psi2, 1, 1e-9, 3) == 1.0);
  CHECK(bernstein_bound_reported(BernsteinVariant::Psi1, 1, 2, 6) == doctest::Approx(0.2707).epsilon(1e-4));
}

TEST_CASE("psi2 check on normalized B_1^4 with theta = e1") {
  const BodySpec body = isotropic_normalize(BodySpec::cross_polytope(4));
  RandomStream rng(5, 5);
  const Psi2Report r = verify_psi2_unconditional(body, {Vector::Unit(4, 0)}, 100000, rng);
  REQUIRE(r.results.size() == 1);
  CHECK(r.pass);
  CHECK(r.results[0].bound == doctest::Approx(6.0));
  CHECK(r.results[0].psi2.band_high <= r.results[0].bound);
  for (const auto& t : r.results[0].tails) CHECK(t.frequency <= t.bound + 4 * t.standard_error);
}

TEST_CASE("psi2 check on the normalized cube with theta = (1, ..., 1)") {
  const BodySpec body = isotropic_normalize(BodySpec::cube(4));
  RandomStream rng(6, 6);
  const Psi2Report r = verify_psi2_unconditional(body, {Vector::Ones(4)}, 100000, rng);
  CHECK(r.pass);
  REQUIRE(r.results[0].tails.size() == 8);
  for (const auto& t : r.results[0].tails) CHECK(t.pass);
  Psi2Options sabotaged;
  sabotaged.psi2_constant = 0.3;
  RandomStream again(6, 6);
  CHECK_FALSE(verify_psi2_unconditional(body, {Vector::Ones(4)}, 100000, again, sabotaged).pass);
}

TEST_CASE("psi2 check rejects bodies outside its hypotheses") {
  RandomStream rng(7, 7);
  CHECK_THROWS_AS(verify_psi2_unconditional(rotated_cube(3, 1), {Vector::Ones(3)}, 100, rng), Error);
  CHECK_THROWS_AS(verify_psi2_unconditional(BodySpec::cube(3), {Vector::Ones(3)}, 100, rng), Error);
}

TEST_CASE("psi1 on the rotated cube is finite, homogeneous and below the psi2 conversion") {
  const BodySpec body = rotated_cube(4, 2);
  RandomStream t(8, 0);
  Vector theta(4);
  for (int i = 0; i < 4; ++i) theta(i) = uniform01(t) - 0.5;
  theta.normalize();
  RandomStream a(8, 1), b(8, 1);
  const Psi1Report r = verify_psi1_general(body, {theta}, 100000, a, 50);
  CHECK(std::isfinite(r.max_ratio));
  CHECK(r.max_ratio > 0);
  CHECK(r.isotropic_constant == doctest::Approx(1.0 / std::sqrt(12.0)));
  CHECK(r.conversion_ok);
  CHECK(r.results[0].psi1.value <= r.results[0].psi2.value / std::log(2.0));
  const Psi1Report s = verify_psi1_general(body, {3.0 * theta}, 100000, b, 50);
  CHECK(s.results[0].psi1.value == doctest::Approx(3.0 * r.results[0].psi1.value).epsilon(1e-6));
}

TEST_CASE("sum tails stay below Bernstein") {
  const BodySpec cube = isotropic_normalize(BodySpec::cube(4));
  RandomStream rng(9, 9);
  const std::vector<double> grid = {0.5, 1, 2, 4, 100};
  const SumTailReport r = empirical_sum_tail(cube, Vector::Ones(4), 4, grid, 20000, rng, BernsteinVariant::Psi2);
  CHECK(r.pass);
  CHECK(r.R == doctest::Approx(3.0 * 2.0));
  for (const auto& p : r.points) CHECK(p.frequency <= p.bound + 4 * p.standard_error);
  CHECK(r.points.back().frequency == 0.0);
  CHECK(r.points[0].bound == doctest::Approx(bernstein_bound(BernsteinVariant::Psi2, 6.0, 0.5, 4)));

  const SumTailReport g =
      empirical_sum_tail(rotated_cube(3, 4), Vector::Unit(3, 0), 3, grid, 20000, rng, BernsteinVariant::Psi1);
  CHECK(g.pass);
  CHECK(g.R > 0);
}

TEST_CASE("single-term tails agree with the single-functional check") {
  const BodySpec body = isotropic_normalize(BodySpec::cross_polytope(2));
  const Vector e1 = Vector::Unit(2, 0);
  RandomStream a(10, 1);
  const SampleBatch c = sample_cone_boundary(body, 200000, a);
  const std::vector<double> v = projections(c.points, e1);
  RandomStream b(10, 2);
  const SumTailReport s = empirical_sum_tail(body, e1, 1, {0.2, 0.4}, 200000, b, BernsteinVariant::Psi2);
  for (const auto& p : s.points) {
    std::size_t hits = 0;
    for (double x : v) hits += std::abs(x) > p.t;
    const double f = double(hits) / v.size();
    CHECK(std::abs(f - p.frequency) <= 5 * std::sqrt(2.0) * std::max(p.standard_error, 1e-4));
  }
}

TEST_CASE("series certificate for B_1^n") {
  RandomStream rng(11, 11);
  for (int n = 1; n <= 8; ++n) {
    Vector theta(n);
    for (int i = 0; i < n; ++i) theta(i) = 2 * uniform01(rng) - 1;
    const SeriesCertificate c = certify_l1_psi2(theta);
    CHECK(c.certified);
    CHECK(c.pass);
    CHECK(c.scaled <= c.bound * (1 + 1e-9));
    CHECK(c.lambda_lower <= c.lambda_cert);
    CHECK(c.bound == doctest::Approx(std::sqrt(6.0) * theta.lpNorm<Eigen::Infinity>()));
  }
}
