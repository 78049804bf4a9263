#include "conehull/gauge.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "conehull/error.hpp"

namespace conehull {
namespace {

/// Dense tableau for min c^T z, A z = b, z >= 0 with an artificial basis.
class Simplex {
 public:
  Simplex(const Matrix& a, const Vector& b)
      : rows_(static_cast<int>(a.rows())),
        structural_(static_cast<int>(a.cols())),
        t_(Matrix::Zero(a.rows() + 1, a.cols() + a.rows() + 1)),
        basis_(a.rows()) {
    const int rhs = structural_ + rows_;
    for (int i = 0; i < rows_; ++i) {
      const double s = b(i) < 0 ? -1.0 : 1.0;
      t_.row(i).head(structural_) = s * a.row(i);
      t_(i, structural_ + i) = 1.0;
      t_(i, rhs) = s * b(i);
      basis_[i] = structural_ + i;
    }
    scale_ = std::max(1.0, t_.topRows(rows_).cwiseAbs().maxCoeff());
  }

  /// Returns false when the constraints are infeasible.
  bool phase_one() {
    Vector c = Vector::Zero(structural_ + rows_);
    c.tail(rows_).setOnes();
    set_objective(c);
    iterate(structural_ + rows_);
    if (objective_value(c) > 1e-9 * scale_) return false;
    // Drive degenerate artificials out of the basis where possible.
    for (int i = 0; i < rows_; ++i) {
      if (basis_[i] < structural_) continue;
      for (int j = 0; j < structural_; ++j) {
        if (std::abs(t_(i, j)) > 1e-9) {
          pivot(i, j);
          break;
        }
      }
    }
    return true;
  }

  double phase_two(const Vector& c_structural) {
    Vector c = Vector::Zero(structural_ + rows_);
    c.head(structural_) = c_structural;
    set_objective(c);
    iterate(structural_);
    return objective_value(c);
  }

 private:
  int rhs() const { return structural_ + rows_; }

  void set_objective(const Vector& c) {
    auto d = t_.row(rows_);
    d.setZero();
    d.head(c.size()) = c.transpose();
    for (int i = 0; i < rows_; ++i) d -= c(basis_[i]) * t_.row(i);
  }

  double objective_value(const Vector& c) const {
    double z = 0.0;
    for (int i = 0; i < rows_; ++i) z += c(basis_[i]) * t_(i, rhs());
    return z;
  }

  /// Dantzig's rule, switching to Bland's rule after a run of degenerate
  /// pivots so the method cannot cycle.
  void iterate(int allowed_columns) {
    const double tol = 1e-11 * scale_;
    int degenerate_run = 0;
    const int max_iter = 50 * (rows_ + allowed_columns) + 1000;
    for (int iter = 0; iter < max_iter; ++iter) {
      const bool bland = degenerate_run > 20;
      int enter = -1;
      double best = -tol;
      for (int j = 0; j < allowed_columns; ++j) {
        const double d = t_(rows_, j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter < 0) return;
      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows_; ++i) {
        const double a = t_(i, enter);
        if (a <= 1e-12 * scale_) continue;
        const double r = t_(i, rhs()) / a;
        if (r < ratio - 1e-15 || (r <= ratio + 1e-15 && leave >= 0 && basis_[i] < basis_[leave])) {
          ratio = r;
          leave = i;
        }
      }
      if (leave < 0) throw Error(ErrorKind::Degenerate, "unbounded linear program");
      degenerate_run = ratio <= 1e-15 ? degenerate_run + 1 : 0;
      pivot(leave, enter);
    }
    throw Error(ErrorKind::BudgetExceeded, "simplex iteration limit reached");
  }

  void pivot(int r, int c) {
    t_.row(r) /= t_(r, c);
    for (int i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[r] = c;
  }

  int rows_;
  int structural_;
  Matrix t_;
  std::vector<int> basis_;
  double scale_ = 1.0;
};

}  // namespace

double hull_gauge(const Matrix& generators, const Vector& x) {
  const Eigen::Index n = generators.rows();
  const Eigen::Index m = generators.cols();
  if (x.size() != n) throw Error(ErrorKind::InvalidArgument, "dimension mismatch in hull_gauge");
  const double xn = x.norm();
  if (xn == 0.0) return 0.0;
  Matrix a(n, 2 * m);
  a << generators, -generators;
  Simplex lp(a, x / xn);
  if (!lp.phase_one()) return std::numeric_limits<double>::infinity();
  return xn * lp.phase_two(Vector::Ones(2 * m));
}

bool in_symmetric_hull(const Matrix& generators, const Vector& x, double slack) {
  return hull_gauge(generators, x) <= 1.0 + slack;
}

double euclidean_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

RadialEstimate radial_moments(const Matrix& generators, std::size_t directions, RandomStream& rng) {
  const int n = static_cast<int>(generators.rows());
  if (directions < 2) throw Error(ErrorKind::InvalidArgument, "need at least two directions");
  std::normal_distribution<double> normal;
  const double ball = euclidean_ball_volume(n);
  double s_vol = 0.0, s_vol2 = 0.0, s_l1 = 0.0, s_l12 = 0.0, s_l2 = 0.0, s_l22 = 0.0;
  Matrix m2 = Matrix::Zero(n, n);
  Vector theta(n);
  for (std::size_t k = 0; k < directions; ++k) {
    do {
      for (int j = 0; j < n; ++j) theta(j) = normal(rng);
    } while (theta.squaredNorm() == 0.0);
    theta.normalize();
    const double g = hull_gauge(generators, theta);
    if (!std::isfinite(g)) throw Error(ErrorKind::DegenerateInput, "generators do not span R^n");
    const double rho = 1.0 / g;
    const double vn = std::pow(rho, n);
    const double v1 = vn * rho * theta.lpNorm<1>();
    const double v2 = vn * rho * rho;
    s_vol += vn;
    s_vol2 += vn * vn;
    s_l1 += v1;
    s_l12 += v1 * v1;
    s_l2 += v2;
    s_l22 += v2 * v2;
    m2.noalias() += v2 * theta * theta.transpose();
  }
  const double k = static_cast<double>(directions);
  auto se = [k](double s, double s2) {
    const double mean = s / k;
    return std::sqrt(std::max(0.0, s2 / k - mean * mean) / (k - 1.0));
  };
  RadialEstimate out;
  out.directions = directions;
  out.volume = ball * s_vol / k;
  out.volume_se = ball * se(s_vol, s_vol2);
  const double c1 = n * ball / (n + 1.0);
  const double c2 = n * ball / (n + 2.0);
  out.integral_l1 = c1 * s_l1 / k;
  out.integral_l1_se = c1 * se(s_l1, s_l12);
  out.integral_l2sq = c2 * s_l2 / k;
  out.integral_l2sq_se = c2 * se(s_l2, s_l22);
  out.second_moment = c2 * m2 / k;
  return out;
}

}  // namespace conehull
