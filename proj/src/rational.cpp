#include "conehull/rational.hpp"

#include <utility>

namespace conehull {

Rational exact_determinant(RationalMatrix m) {
  const int n = m.size;
  Rational det = 1;
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r) {
      if (sgn(m(r, col)) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) return 0;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(m(pivot, c), m(col, c));
      det = -det;
    }
    det *= m(col, col);
    for (int r = col + 1; r < n; ++r) {
      if (sgn(m(r, col)) == 0) continue;
      const Rational factor = m(r, col) / m(col, col);
      for (int c = col + 1; c < n; ++c) m(r, c) -= factor * m(col, c);
    }
  }
  return det;
}

Rational exact_determinant(const Eigen::MatrixXd& m) {
  RationalMatrix q(static_cast<int>(m.rows()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) q(r, c) = to_rational(m(r, c));
  return exact_determinant(std::move(q));
}

int sign(const Rational& x) { return sgn(x); }

Rational factorial(unsigned long k) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), k);
  return Rational(f);
}

}  // namespace conehull
