#pragma once

#include <cstddef>

#include "conehull/rng.hpp"
#include "conehull/types.hpp"

namespace conehull {

/// Gauge of conv{+-g_1, ..., +-g_m} at x, i.e. min ||lambda||_1 subject to
/// G lambda = x, solved by a two-phase dense simplex. Returns +infinity when
/// x is outside the span of the generators.
double hull_gauge(const Matrix& generators, const Vector& x);

/// Membership in conv{+-g_j} with a relative slack on the gauge.
bool in_symmetric_hull(const Matrix& generators, const Vector& x, double slack = 1e-9);

/// Moments of conv{+-g_j} from its radial function rho = 1 / gauge along
/// uniform random directions:
///   |K| = |B_2^n| E rho^n,   int_K x x^T = n |B_2^n| / (n+2) E rho^{n+2} theta theta^T,
///   int_K ||x||_1 = n |B_2^n| / (n+1) E rho^{n+1} ||theta||_1.
struct RadialEstimate {
  double volume = 0.0;
  double volume_se = 0.0;
  Matrix second_moment;  ///< int_K x x^T dx
  double integral_l1 = 0.0;
  double integral_l1_se = 0.0;
  double integral_l2sq = 0.0;
  double integral_l2sq_se = 0.0;
  std::size_t directions = 0;
};

RadialEstimate radial_moments(const Matrix& generators, std::size_t directions, RandomStream& rng);

/// Volume of the Euclidean unit ball in dimension n.
double euclidean_ball_volume(int n);

}  // namespace conehull
