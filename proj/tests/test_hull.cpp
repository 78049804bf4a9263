#include <doctest.h>

#include <cmath>
#include <set>

#include "conehull/body.hpp"
#include "conehull/error.hpp"
#include "conehull/hull.hpp"
#include "conehull/sampling.hpp"

using namespace conehull;

namespace {

SymmetricPolytope random_hull(int n, std::size_t count, std::uint64_t stream) {
  RandomStream rng(42, stream);
  return build_hull(sample_cone_boundary(BodySpec::cross_polytope(n), count, rng));
}

Rational factorial_q(int k) { return factorial(static_cast<unsigned long>(k)); }

// Unpruned reference: every facet, every sign vector.
double brute_sign_max(const SymmetricPolytope& p, bool l1) {
  double best = 0.0;
  for (const auto& f : p.facets)
    for (int mask = 0; mask < (1 << p.dim); ++mask) {
      Vector s = Vector::Zero(p.dim);
      for (int i = 0; i < p.dim; ++i) s += ((mask >> i) & 1 ? -1.0 : 1.0) * p.points.col(f.vertices[i]);
      best = std::max(best, l1 ? s.lpNorm<1>() : s.squaredNorm());
    }
  return best;
}

}  // namespace

TEST_CASE("basis vectors give the cross-polytope") {
  for (int n = 2; n <= 6; ++n) {
    const SymmetricPolytope p = build_hull(Matrix::Identity(n, n));
    CHECK(p.facets.size() == (std::size_t{1} << n));
    CHECK(p.vertex_count() == 2 * n);
    CHECK(polytope_volume_exact(p) == Rational(1 << n) / factorial_q(n));
    CHECK(p.volume == doctest::Approx(std::ldexp(1.0, n) / std::tgamma(n + 1.0)));
  }
}

TEST_CASE("interior point is absorbed") {
  Matrix g(2, 3);
  g << 1, 0, 0.1, 0, 1, 0.1;
  const SymmetricPolytope p = build_hull(g);
  CHECK(p.facets.size() == 4);
  const auto v = p.vertex_indices();
  for (int i : v) CHECK(std::abs(p.points(0, i) - 0.1) + std::abs(p.points(1, i) - 0.1) > 1e-12);
  CHECK(p.vertex_count() == 4);
  CHECK(p.volume == doctest::Approx(2.0));
}

TEST_CASE("N = n random cone points give 2N vertices and an antipodal facet structure") {
  for (int n = 2; n <= 6; ++n) {
    const SymmetricPolytope p = random_hull(n, n, n);
    CHECK(p.vertex_count() == 2 * n);
    CHECK(p.facets.size() == (std::size_t{1} << n));
  }
  const SymmetricPolytope p = random_hull(4, 12, 99);
  std::set<std::vector<int>> sets;
  for (const auto& f : p.facets) {
    auto v = f.vertices;
    std::sort(v.begin(), v.end());
    sets.insert(v);
  }
  for (const auto& f : p.facets) {
    std::vector<int> neg;
    for (int i : f.vertices) neg.push_back(p.negation[i]);
    std::sort(neg.begin(), neg.end());
    CHECK(sets.count(neg) == 1);
    CHECK(f.normal.norm() == doctest::Approx(1.0));
    for (int i : f.vertices) CHECK(f.normal.dot(p.points.col(i)) == doctest::Approx(f.offset));
  }
  for (int v : p.vertex_indices()) CHECK(p.gauge(p.points.col(v)) == doctest::Approx(1.0));
}

TEST_CASE("volume sums cone simplices and matches a membership estimate") {
  const SymmetricPolytope p = random_hull(3, 10, 7);
  double sum = 0.0;
  for (const auto& f : p.facets) {
    Matrix m(3, 3);
    for (int i = 0; i < 3; ++i) m.col(i) = p.points.col(f.vertices[i]);
    sum += std::abs(m.determinant()) / 6.0;
  }
  CHECK(p.volume == doctest::Approx(sum).epsilon(1e-12));
  CHECK(polytope_volume_exact(p).get_d() == doctest::Approx(p.volume).epsilon(1e-12));

  // rejection from the bounding box [-1, 1]^3, which contains conv of B_1 points
  RandomStream rng(1, 1);
  const std::size_t count = 1000000;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < count; ++k) {
    Vector x(3);
    for (int i = 0; i < 3; ++i) x(i) = 2 * uniform01(rng) - 1;
    hits += p.gauge(x) <= 1.0;
  }
  const double f = double(hits) / count;
  const double se = 8.0 * std::sqrt(f * (1 - f) / count);
  CHECK(std::abs(8.0 * f - p.volume) <= 4 * se);
}

TEST_CASE("cube vertices: volume 4 with triangulated facets") {
  Matrix g(2, 2);
  g << 1, 1, 1, -1;
  const SymmetricPolytope p = build_hull(g);
  CHECK(p.volume == doctest::Approx(4.0));
  Matrix g3(3, 4);
  g3 << 1, 1, 1, 1, 1, 1, -1, -1, 1, -1, 1, -1;
  CHECK_THROWS_AS(build_hull(g3), Error);
  HullOptions options;
  options.allow_non_simplicial = true;
  const SymmetricPolytope c = build_hull(g3, options);
  CHECK_FALSE(c.simplicial);
  CHECK(polytope_volume_exact(c) == 8);
}

TEST_CASE("second moments") {
  // unit simplex conv{0, e1, e2} is a quarter of B_1^2
  const SymmetricPolytope b1 = build_hull(Matrix::Identity(2, 2));
  const auto exact = polytope_covariance_exact(b1);
  CHECK(exact[0] == Rational(1, 3));
  CHECK(exact[1] == 0);
  CHECK(exact[0] / 4 == Rational(1, 12));
  CHECK(b1.covariance()(0, 0) == doctest::Approx(1.0 / 6.0));

  const SymmetricPolytope p = random_hull(3, 9, 3);
  const Matrix m = polytope_covariance(p);
  CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
  RandomStream rng(2, 2);
  const std::size_t count = 200000;
  const Matrix pts = sample_in_polytope(p, count, rng);
  for (int r = 0; r < 3; ++r)
    for (int c = r; c < 3; ++c) {
      std::vector<double> v(count);
      for (std::size_t j = 0; j < count; ++j) v[j] = pts(r, j) * pts(c, j);
      double mu = 0.0, s2 = 0.0;
      for (double a : v) mu += a;
      mu /= count;
      for (double a : v) s2 += (a - mu) * (a - mu);
      const double se = std::sqrt(s2 / (count - 1) / count);
      CHECK(std::abs(mu - m(r, c) / p.volume) <= 4 * se);
    }
  for (std::size_t j = 0; j < 1000; ++j) CHECK(p.gauge(pts.col(j)) <= 1 + 1e-12);
}

TEST_CASE("exact 1-norm integrals") {
  const SymmetricPolytope b1 = build_hull(Matrix::Identity(2, 2));
  const IntegralEstimate a = integral_l1(b1, IntegralMode::Exact);
  CHECK(a.exact);
  CHECK(a.value == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  Matrix cube(2, 2);
  cube << 1, 1, 1, -1;
  CHECK(integral_l1(build_hull(cube), IntegralMode::Exact).value == doctest::Approx(4.0).epsilon(1e-14));
  // n |B_1^n| / (n + 1)
  for (int n = 3; n <= 6; ++n) {
    const double vol = std::ldexp(1.0, n) / std::tgamma(n + 1.0);
    CHECK(integral_l1(build_hull(Matrix::Identity(n, n)), IntegralMode::Exact).value ==
          doctest::Approx(n * vol / (n + 1)).epsilon(1e-13));
  }
}

TEST_CASE("exact and Monte Carlo 1-norm integrals agree") {
  for (std::uint64_t s = 0; s < 3; ++s) {
    const SymmetricPolytope p = random_hull(3, 8, 100 + s);
    RandomStream rng(3, s);
    const IntegralEstimate e = integral_l1(p, IntegralMode::Exact);
    const IntegralEstimate m = integral_l1(p, IntegralMode::MonteCarlo, &rng, 200000);
    CHECK_FALSE(m.exact);
    CHECK(m.standard_error > 0);
    CHECK(std::abs(e.value - m.value) <= 4 * m.standard_error);
  }
  const SymmetricPolytope p = random_hull(3, 8, 1);
  CHECK_THROWS_AS(integral_l1(p, IntegralMode::MonteCarlo), Error);
}

TEST_CASE("facet sign sums") {
  const SymmetricPolytope b1 = build_hull(Matrix::Identity(2, 2));
  CHECK(facet_sign_sum_max(b1, SignNorm::L1) == doctest::Approx(2.0));
  CHECK(facet_sign_sum_max(b1, SignNorm::L2Squared) == doctest::Approx(2.0));
  for (std::uint64_t s = 0; s < 5; ++s) {
    const SymmetricPolytope p = random_hull(3, 7, 200 + s);
    CHECK(facet_sign_sum_max(p, SignNorm::L1) == doctest::Approx(brute_sign_max(p, true)).epsilon(1e-14));
    CHECK(facet_sign_sum_max(p, SignNorm::L2Squared) == doctest::Approx(brute_sign_max(p, false)).epsilon(1e-14));
  }
}

TEST_CASE("facet inequalities on random hulls") {
  for (int n = 3; n <= 4; ++n)
    for (std::uint64_t s = 0; s < 5; ++s) {
      const SymmetricPolytope p = random_hull(n, 3 * n, 300 + 10 * n + s);
      const double mean_l1 = integral_l1(p, IntegralMode::Exact).value / p.volume;
      const double mean_l2 = polytope_covariance(p).trace() / p.volume;
      CHECK(mean_l1 <= (1 + std::sqrt(2.0)) / n * facet_sign_sum_max(p, SignNorm::L1));
      CHECK(mean_l2 <= 2.0 / ((n + 1) * (n + 2)) * facet_sign_sum_max(p, SignNorm::L2Squared));
    }
}

TEST_CASE("adding a generator never shrinks the hull") {
  RandomStream rng(5, 5);
  const SampleBatch b = sample_cone_boundary(BodySpec::cross_polytope(3), 12, rng);
  double previous = 0.0;
  for (int k = 3; k <= 12; ++k) {
    const SymmetricPolytope p = build_hull(Matrix(b.points.leftCols(k)));
    CHECK(p.volume >= previous);
    previous = p.volume;
  }
}

TEST_CASE("error kinds") {
  auto kind_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::ConfigError;
  };
  Matrix flat(3, 2);
  flat << 1, 0, 0, 1, 0, 0;
  CHECK(kind_of([&] { build_hull(flat); }) == ErrorKind::DegenerateInput);
  CHECK(kind_of([&] { build_hull(Matrix::Identity(9, 9)); }) == ErrorKind::DimensionTooLarge);
  Matrix square(2, 2);
  square << 1, 1, 1, -1;
  Matrix cube3(3, 4);
  cube3 << 1, 1, 1, 1, 1, 1, -1, -1, 1, -1, 1, -1;
  CHECK(kind_of([&] { build_hull(cube3); }) == ErrorKind::NonSimplicialFacet);
}

TEST_CASE("polytope JSON round trip") {
  const SymmetricPolytope p = random_hull(3, 6, 77);
  const nlohmann::json doc = polytope_to_json(p);
  CHECK(doc.contains("generators"));
  CHECK(doc.contains("facets"));
  CHECK(doc.contains("volume"));
  const SymmetricPolytope q = polytope_from_json(nlohmann::json::parse(doc.dump()));
  CHECK(q.generators == p.generators);
  CHECK(q.facets.size() == p.facets.size());
  CHECK(q.volume == p.volume);
  CHECK(q.second_moment == p.second_moment);
}
