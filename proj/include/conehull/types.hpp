#pragma once

#include <Eigen/Dense>

namespace conehull {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Largest dimension for which hulls are enumerated facet by facet.
inline constexpr int kMaxExactHullDim = 8;

/// Largest dimension for the exact rational integral of the 1-norm.
inline constexpr int kMaxExactL1Dim = 8;
/// Automatic mode switches to Monte Carlo for the 1-norm integral above this;
/// the exact cost grows with the facet count (seconds per hull at n = 7).
inline constexpr int kAutoExactL1Dim = 5;

}  // namespace conehull
