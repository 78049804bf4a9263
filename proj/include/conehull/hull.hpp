#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "conehull/rational.hpp"
#include "conehull/rng.hpp"
#include "conehull/sampling.hpp"
#include "conehull/types.hpp"

namespace conehull {

/// A simplicial facet conv{y_1, ..., y_n} with <normal, y_i> = offset.
struct Facet {
  std::vector<int> vertices;  ///< column indices into SymmetricPolytope::points
  Vector normal;              ///< outward unit normal
  double offset;              ///< distance of the facet hyperplane to the origin
};

struct HullOptions {
  /// Accept inputs whose hull has non-simplicial facets (e.g. cube
  /// vertices); such facets are returned triangulated. Random inputs are in
  /// general position, so by default a coplanar adjacency is an error.
  bool allow_non_simplicial = false;
};

/// conv{+-X_1, ..., +-X_N} with its facets, volume and second moments.
struct SymmetricPolytope {
  int dim = 0;
  Matrix generators;          ///< the +X_i, one per column
  Matrix points;              ///< de-duplicated +-X_i, one per column
  std::vector<int> negation;  ///< points.col(negation[i]) == -points.col(i)
  std::vector<Facet> facets;
  double volume = 0.0;
  Matrix second_moment;       ///< integral of x x^T over P
  bool simplicial = true;

  std::vector<int> vertex_indices() const;
  int vertex_count() const;

  /// Minkowski functional of P evaluated through the facet inequalities.
  double gauge(const Vector& x) const;

  /// E[x x^T] under the uniform distribution on P.
  Matrix covariance() const { return second_moment / volume; }
};

/// Quickhull seeded with the cross-polytope conv{+-b_1..+-b_n} of a well
/// conditioned basis. Orientation predicates are filtered in floating point
/// and fall back to exact rational determinants near zero.
///
/// Errors: DegenerateInput (rank < n), NonSimplicialFacet (coplanar adjacent
/// facets when not allowed), DimensionTooLarge (n > kMaxExactHullDim).
SymmetricPolytope build_hull(const Matrix& generators, const HullOptions& options = {});
SymmetricPolytope build_hull(const SampleBatch& batch, const HullOptions& options = {});

/// Sum over facets of |det[y_1 ... y_n]| / n!.
double polytope_volume(const SymmetricPolytope& polytope);

/// Integral of x x^T over P, summed over the cone simplices conv{0, facet}.
Matrix polytope_covariance(const SymmetricPolytope& polytope);

Rational polytope_volume_exact(const SymmetricPolytope& polytope);
/// Row-major n x n.
std::vector<Rational> polytope_covariance_exact(const SymmetricPolytope& polytope);

enum class IntegralMode { Exact, MonteCarlo };

struct IntegralEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  bool exact = false;
  std::size_t samples = 0;
};

/// Integral of ||x||_1 over P. Exact mode integrates |x_c| over every cone
/// simplex in rationals through divided differences of t_+^{n+1} at the
/// vertex values (n <= kMaxExactL1Dim); Monte Carlo mode samples P uniformly
/// through its cone triangulation and needs `rng`.
IntegralEstimate integral_l1(const SymmetricPolytope& polytope, IntegralMode mode,
                             RandomStream* rng = nullptr,
                             std::size_t samples = 100000);

enum class SignNorm { L1, L2Squared };

/// max over facets {y_i} and signs of ||eps_1 y_1 + ... + eps_n y_n||.
double facet_sign_sum_max(const SymmetricPolytope& polytope, SignNorm norm);

/// Uniform points in P, one per column.
Matrix sample_in_polytope(const SymmetricPolytope& polytope, std::size_t count,
                          RandomStream& rng);

nlohmann::json polytope_to_json(const SymmetricPolytope& polytope);
SymmetricPolytope polytope_from_json(const nlohmann::json& doc);

}  // namespace conehull
