#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "conehull/rng.hpp"
#include "conehull/types.hpp"

namespace conehull {

/// Exponent of an l_p ball. Infinity is a distinct state, never a large float.
class PNorm {
 public:
  static PNorm finite(double p);
  static PNorm infinity() { return PNorm(0.0, true); }

  bool is_infinite() const { return infinite_; }
  /// Only meaningful when finite.
  double value() const { return p_; }

  bool operator==(const PNorm&) const = default;

 private:
  PNorm(double p, bool infinite) : p_(p), infinite_(infinite) {}
  double p_;
  bool infinite_;
};

double lp_norm(const Vector& x, PNorm p);

class BodySpec;

struct LpBall {
  PNorm p;
};

/// c * B_1^n.
struct ScaledL1 {
  double c;
};

/// One symmetric slab |<normal, x>| <= offset with a unit normal.
struct Slab {
  Vector normal;
  double offset;
};

/// Exact data of an H-polytope obtained by enumerating its vertices.
struct HPolytopeCache {
  Matrix vertices;       ///< one vertex per column
  double volume;
  Matrix second_moment;  ///< integral of x x^T over the body
  Vector half_widths;    ///< bounding box [-w, w]
};

struct SymmetricHPolytope {
  std::vector<Slab> rows;
  /// Vertices, volume and second moments, filled at construction when the
  /// dimension allows exact enumeration.
  std::shared_ptr<const HPolytopeCache> cache;
};

struct LinearImage {
  std::shared_ptr<const BodySpec> inner;
  Matrix map;
  Matrix inverse;
};

/// A symmetric convex body together with the oracles the rest of the library
/// consumes. Instances are immutable and cheap to copy.
class BodySpec {
 public:
  using Kind = std::variant<LpBall, ScaledL1, SymmetricHPolytope, LinearImage>;

  static BodySpec lp_ball(int dim, PNorm p);
  static BodySpec cross_polytope(int dim) { return lp_ball(dim, PNorm::finite(1.0)); }
  static BodySpec cube(int dim) { return lp_ball(dim, PNorm::infinity()); }
  static BodySpec scaled_l1(int dim, double c);
  /// Rows (a_i, b_i) describe |<a_i, x>| <= b_i; normals are rescaled to
  /// unit length. Throws DegenerateInput if the slabs do not bound a body.
  static BodySpec h_polytope(int dim, const std::vector<Slab>& rows);
  /// T K. Throws IllConditioned when cond(T) exceeds kMaxCondition.
  static BodySpec linear_image(const BodySpec& inner, const Matrix& map);

  int dim() const { return dim_; }
  const Kind& kind() const { return kind_; }

  std::string describe() const;

  static constexpr double kMaxCondition = 1e6;

 private:
  BodySpec(int dim, Kind kind) : dim_(dim), kind_(std::move(kind)) {}
  int dim_;
  Kind kind_;
};

/// Moments of the uniform distribution on a body.
struct IsotropicProfile {
  double volume;
  Matrix covariance;  ///< E[x x^T] under the uniform distribution on K
  double isotropic_constant;
  bool is_unconditional;
};

/// inf{r > 0 : x in rK}.
double minkowski_functional(const BodySpec& body, const Vector& x);

/// Lebesgue measure. H-polytopes above kMaxExactHullDim raise DimensionTooLarge.
double body_volume(const BodySpec& body);

/// Second moment matrix E[x x^T] of the uniform distribution on K.
Matrix body_covariance(const BodySpec& body);

bool is_unconditional(const BodySpec& body);

IsotropicProfile body_profile(const BodySpec& body);

/// det(Cov)^{1/(2n)} / |K|^{1/n}.
double body_isotropic_constant(const BodySpec& body);

/// Returns T K with |TK| = 1 and Cov(TK) = L_K^2 I. T is the symmetric
/// inverse square root of Cov scaled for unit volume, so diagonal covariance
/// gives a diagonal map. Nested linear images are composed into one map.
BodySpec isotropic_normalize(const BodySpec& body);

/// Haar-distributed orthogonal matrix.
Matrix random_rotation(int dim, RandomStream& rng);

/// Isotropic cube rotated by a Haar-random orthogonal map (not unconditional).
BodySpec rotated_cube(int dim, std::uint64_t rotation_seed);

/// Parses {"kind": "lp_ball", "p": 1.0, "dim": 4} and analogues. Kinds:
/// lp_ball (p number or "inf"), cube, cross_polytope, scaled_l1 (c),
/// h_polytope (rows: [{"normal": [...], "offset": b}]), linear_image
/// (inner, map), rotated_cube (rotation_seed). "isotropic": true wraps the
/// result in isotropic_normalize.
BodySpec body_from_json(const nlohmann::json& doc);
nlohmann::json body_to_json(const BodySpec& body);

}  // namespace conehull
