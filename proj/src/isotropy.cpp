#include "conehull/isotropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <vector>

#include "conehull/error.hpp"

namespace conehull {
namespace {

/// max over eps with eps_0 = +1 of ||sum eps_k z_k|| (Gray code order).
double sign_sum_max(const Matrix& z, SubsetNorm norm) {
  const int n = static_cast<int>(z.cols());
  Vector s = z.rowwise().sum();
  auto value = [&] { return norm == SubsetNorm::L1 ? s.lpNorm<1>() : s.norm(); };
  double best = value();
  std::vector<int> eps(n, 1);
  const std::uint64_t patterns = std::uint64_t{1} << (n - 1);
  for (std::uint64_t g = 1; g < patterns; ++g) {
    const int k = std::countr_zero(g) + 1;
    eps[k] = -eps[k];
    s += 2.0 * eps[k] * z.col(k);
    best = std::max(best, value());
  }
  return best;
}

}  // namespace

double isotropic_constant_from_moments(double volume, const Matrix& second_moment_integral) {
  const auto n = static_cast<double>(second_moment_integral.rows());
  if (!(volume > 0.0)) throw Error(ErrorKind::SingularCovariance, "nonpositive volume");
  const Matrix cov = second_moment_integral / volume;
  Eigen::LLT<Matrix> llt(0.5 * (cov + cov.transpose()));
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::SingularCovariance, "covariance not positive definite");
  // log det C from the Cholesky factor avoids under/overflow.
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return std::exp(log_det / (2.0 * n) - std::log(volume) / n);
}

double isotropic_constant_polytope(const SymmetricPolytope& polytope) {
  return isotropic_constant_from_moments(polytope.volume, polytope.second_moment);
}

BoundChain bound_chain(const SymmetricPolytope& polytope, RandomStream* rng, const BoundChainOptions& options) {
  const int n = polytope.dim;
  const double dn = n;
  BoundChain b;
  b.l_exact = isotropic_constant_polytope(polytope);
  b.volume_radius = std::pow(polytope.volume, 1.0 / dn);

  bool exact = options.l1_mode == L1Mode::Exact || (options.l1_mode == L1Mode::Auto && n <= kAutoExactL1Dim);
  if (!exact && rng == nullptr) {
    if (options.l1_mode == L1Mode::MonteCarlo)
      throw Error(ErrorKind::InvalidArgument, "Monte Carlo 1-norm integral needs a random stream");
    exact = true;
  }
  const IntegralEstimate l1 = integral_l1(polytope, exact ? IntegralMode::Exact : IntegralMode::MonteCarlo, rng,
                                          options.l1_samples);
  b.l1_exact = l1.exact;
  b.mean_l1 = l1.value / polytope.volume;
  b.mean_l1_se = l1.standard_error / polytope.volume;
  b.l1_bound_raw = b.mean_l1 / (dn * b.volume_radius);
  b.l1_bound_raw_se = b.mean_l1_se / (dn * b.volume_radius);

  b.mean_l2sq = polytope.second_moment.trace() / polytope.volume;
  b.l2_bound = std::sqrt(b.mean_l2sq / dn) / b.volume_radius;

  b.facet_l1 = (1.0 + std::sqrt(2.0)) / dn * facet_sign_sum_max(polytope, SignNorm::L1);
  b.facet_l2sq = 2.0 / ((dn + 1.0) * (dn + 2.0)) * facet_sign_sum_max(polytope, SignNorm::L2Squared);
  return b;
}

BoundChain bound_chain(int dim, const RadialEstimate& radial) {
  const double dn = dim;
  BoundChain b;
  b.l_exact = isotropic_constant_from_moments(radial.volume, radial.second_moment);
  b.volume_radius = std::pow(radial.volume, 1.0 / dn);
  b.mean_l1 = radial.integral_l1 / radial.volume;
  b.mean_l1_se = radial.integral_l1_se / radial.volume;
  b.l1_bound_raw = b.mean_l1 / (dn * b.volume_radius);
  b.l1_bound_raw_se = b.mean_l1_se / (dn * b.volume_radius);
  b.mean_l2sq = radial.integral_l2sq / radial.volume;
  b.l2_bound = std::sqrt(b.mean_l2sq / dn) / b.volume_radius;
  return b;
}

std::uint64_t exhaustive_subset_work(int dim, std::size_t count) {
  const std::uint64_t m = 2 * static_cast<std::uint64_t>(count);
  if (static_cast<std::uint64_t>(dim) > m) return 0;
  long double c = 1.0L;
  for (int k = 0; k < dim; ++k) c = c * static_cast<long double>(m - k) / static_cast<long double>(k + 1);
  c *= std::ldexp(1.0L, dim - 1);
  if (c >= 1.8e19L) return UINT64_MAX;
  return static_cast<std::uint64_t>(std::llround(c));
}

SubsetMax max_subset_sign_sum(const Matrix& points, SubsetNorm norm, std::uint64_t subset_budget,
                              RandomStream& rng, SubsetMode mode,
                              std::uint64_t exhaustive_cap) {
  const int n = static_cast<int>(points.rows());
  const auto count = static_cast<std::size_t>(points.cols());
  if (count < static_cast<std::size_t>(n)) throw Error(ErrorKind::InvalidArgument, "need N >= n points");
  if (subset_budget < 1) throw Error(ErrorKind::InvalidArgument, "subset budget must be positive");
  const std::uint64_t work = exhaustive_subset_work(n, count);
  bool exhaustive = mode == SubsetMode::Exhaustive || (mode == SubsetMode::Auto && work <= exhaustive_cap);
  if (mode == SubsetMode::Exhaustive && work > exhaustive_cap)
    throw Error(ErrorKind::BudgetExceeded, "exhaustive subset enumeration beyond cap of " +
                                               std::to_string(exhaustive_cap));

  Matrix all(n, static_cast<Eigen::Index>(2 * count));
  all << points, -points;
  const int m = static_cast<int>(all.cols());
  Matrix z(n, n);
  SubsetMax out;
  out.exhaustive = exhaustive;
  if (exhaustive) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      for (int k = 0; k < n; ++k) z.col(k) = all.col(idx[k]);
      out.value = std::max(out.value, sign_sum_max(z, norm));
      ++out.subsets;
      int k = n - 1;
      while (k >= 0 && idx[k] == m - n + k) --k;
      if (k < 0) break;
      ++idx[k];
      for (int j = k + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
  }
  std::vector<int> pool(m);
  for (std::uint64_t s = 0; s < subset_budget; ++s) {
    std::iota(pool.begin(), pool.end(), 0);
    // Partial Fisher-Yates: the first n entries form a uniform n-subset.
    for (int k = 0; k < n; ++k) {
      const auto j = k + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(m - k)));
      std::swap(pool[k], pool[j]);
    }
    // Enumeration order, so a sampled subset rounds exactly as in the
    // exhaustive pass.
    std::sort(pool.begin(), pool.begin() + n);
    for (int k = 0; k < n; ++k) z.col(k) = all.col(pool[k]);
    out.value = std::max(out.value, sign_sum_max(z, norm));
    ++out.subsets;
  }
  return out;
}

}  // namespace conehull
