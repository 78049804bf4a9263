#include <doctest.h>

#include <cmath>

#include "conehull/body.hpp"
#include "conehull/gauge.hpp"
#include "conehull/hull.hpp"
#include "conehull/sampling.hpp"

using namespace conehull;

TEST_CASE("gauge of the cross-polytope is the 1-norm") {
  RandomStream rng(1, 1);
  const Matrix g = Matrix::Identity(4, 4);
  for (int k = 0; k < 50; ++k) {
    Vector x(4);
    for (int i = 0; i < 4; ++i) x(i) = uniform01(rng) - 0.5;
    CHECK(hull_gauge(g, x) == doctest::Approx(x.lpNorm<1>()).epsilon(1e-12));
  }
  CHECK(hull_gauge(g, Vector::Zero(4)) == 0.0);
}

TEST_CASE("gauge agrees with the facet description") {
  RandomStream rng(2, 2);
  const SampleBatch b = sample_cone_boundary(BodySpec::lp_ball(3, PNorm::finite(3.0)), 15, rng);
  const SymmetricPolytope p = build_hull(b);
  for (int k = 0; k < 50; ++k) {
    Vector x(3);
    for (int i = 0; i < 3; ++i) x(i) = 2 * uniform01(rng) - 1;
    CHECK(hull_gauge(b.points, x) == doctest::Approx(p.gauge(x)).epsilon(1e-9));
    CHECK(in_symmetric_hull(b.points, x) == (p.gauge(x) <= 1 + 1e-9));
  }
}

TEST_CASE("points outside the span have infinite gauge") {
  Matrix g(3, 2);
  g << 1, 0, 0, 1, 0, 0;
  CHECK(std::isinf(hull_gauge(g, Vector::Unit(3, 2))));
  CHECK(hull_gauge(g, Vector::Unit(3, 1)) == doctest::Approx(1.0));
}

TEST_CASE("euclidean ball volumes") {
  CHECK(euclidean_ball_volume(1) == doctest::Approx(2.0));
  CHECK(euclidean_ball_volume(2) == doctest::Approx(M_PI));
  CHECK(euclidean_ball_volume(3) == doctest::Approx(4.0 * M_PI / 3.0));
}

TEST_CASE("radial moments estimate the exact moments") {
  RandomStream rng(3, 3);
  const SampleBatch b = sample_cone_boundary(BodySpec::cross_polytope(3), 10, rng);
  const SymmetricPolytope p = build_hull(b);
  const RadialEstimate r = radial_moments(b.points, 200000, rng);
  CHECK(r.directions == 200000);
  CHECK(std::abs(r.volume - p.volume) <= 4 * r.volume_se);
  const double l1 = integral_l1(p, IntegralMode::Exact).value;
  CHECK(std::abs(r.integral_l1 - l1) <= 4 * r.integral_l1_se);
  const double l2 = p.second_moment.trace();
  CHECK(std::abs(r.integral_l2sq - l2) <= 4 * r.integral_l2sq_se);
  CHECK(std::abs(r.second_moment.trace() - r.integral_l2sq) <= 1e-9 * r.integral_l2sq);
}
