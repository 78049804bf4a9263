#pragma once

#include <gmpxx.h>

#include <Eigen/Dense>
#include <vector>

namespace conehull {

using Rational = mpq_class;

/// Square matrix of rationals in row-major order.
struct RationalMatrix {
  int size = 0;
  std::vector<Rational> entries;

  explicit RationalMatrix(int n) : size(n), entries(static_cast<size_t>(n) * n) {}
  Rational& operator()(int r, int c) { return entries[static_cast<size_t>(r) * size + c]; }
  const Rational& operator()(int r, int c) const {
    return entries[static_cast<size_t>(r) * size + c];
  }
};

/// Doubles are dyadic rationals; the conversion is exact.
inline Rational to_rational(double x) { return Rational(x); }

Rational exact_determinant(RationalMatrix m);

/// Exact determinant of a double matrix, evaluated in rationals.
Rational exact_determinant(const Eigen::MatrixXd& m);

int sign(const Rational& x);

Rational factorial(unsigned long k);

}  // namespace conehull
