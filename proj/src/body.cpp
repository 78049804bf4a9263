#include "conehull/body.hpp"
#include "conehull/overloaded.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "conehull/error.hpp"
#include "conehull/hull.hpp"

namespace conehull {
namespace {

double log_factorial(int n) { return std::lgamma(n + 1.0); }

bool is_diagonal(const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (r != c && m(r, c) != 0.0) return false;
  return true;
}

std::shared_ptr<const HPolytopeCache> enumerate_vertices(int dim, const std::vector<Slab>& rows) {
  // K = {x : |<a_i, x>| <= b_i} is the polar of conv{+-a_i / b_i}; each facet
  // {<u, y> = 1} of that hull is the vertex u of K.
  Matrix polar(dim, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    polar.col(static_cast<Eigen::Index>(i)) = rows[i].normal / rows[i].offset;
  HullOptions permissive{.allow_non_simplicial = true};
  const SymmetricPolytope dual = build_hull(polar, permissive);

  std::vector<Vector> verts;
  for (const auto& f : dual.facets) {
    const Vector u = f.normal / f.offset;
    bool seen = false;
    for (const auto& v : verts)
      if ((v - u).norm() <= 1e-9 * (1.0 + u.norm())) {
        seen = true;
        break;
      }
    if (!seen) verts.push_back(u);
  }
  Matrix vm(dim, static_cast<Eigen::Index>(verts.size()));
  for (std::size_t i = 0; i < verts.size(); ++i) vm.col(static_cast<Eigen::Index>(i)) = verts[i];
  const SymmetricPolytope primal = build_hull(vm, permissive);

  auto cache = std::make_shared<HPolytopeCache>();
  cache->vertices = vm;
  cache->volume = primal.volume;
  cache->second_moment = primal.second_moment;
  cache->half_widths = vm.cwiseAbs().rowwise().maxCoeff();
  return cache;
}

}  // namespace

PNorm PNorm::finite(double p) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw Error(ErrorKind::InvalidArgument, "l_p exponent must be a finite p >= 1");
  return PNorm(p, false);
}

double lp_norm(const Vector& x, PNorm p) {
  if (p.is_infinite()) return x.lpNorm<Eigen::Infinity>();
  if (p.value() == 1.0) return x.lpNorm<1>();
  if (p.value() == 2.0) return x.norm();
  const double scale = x.lpNorm<Eigen::Infinity>();
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x(i)) / scale, p.value());
  return scale * std::pow(s, 1.0 / p.value());
}

BodySpec BodySpec::lp_ball(int dim, PNorm p) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  return BodySpec(dim, LpBall{p});
}

BodySpec BodySpec::scaled_l1(int dim, double c) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  if (!(c > 0.0) || !std::isfinite(c))
    throw Error(ErrorKind::InvalidArgument, "scale must be a positive real");
  return BodySpec(dim, ScaledL1{c});
}

BodySpec BodySpec::h_polytope(int dim, const std::vector<Slab>& rows) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  if (rows.empty()) throw Error(ErrorKind::DegenerateInput, "no slabs");
  std::vector<Slab> unit;
  for (const auto& r : rows) {
    if (r.normal.size() != dim) throw Error(ErrorKind::InvalidArgument, "slab normal has wrong dimension");
    const double len = r.normal.norm();
    if (!(len > 0.0) || !(r.offset > 0.0) || !std::isfinite(r.offset))
      throw Error(ErrorKind::InvalidArgument, "slab needs a nonzero normal and a positive offset");
    unit.push_back(Slab{r.normal / len, r.offset / len});
  }
  SymmetricHPolytope h{unit, nullptr};
  if (dim <= kMaxExactHullDim) {
    h.cache = enumerate_vertices(dim, unit);
  } else {
    Matrix a(dim, static_cast<Eigen::Index>(unit.size()));
    for (std::size_t i = 0; i < unit.size(); ++i) a.col(static_cast<Eigen::Index>(i)) = unit[i].normal;
    Eigen::FullPivLU<Matrix> lu(a);
    if (lu.rank() < dim) throw Error(ErrorKind::DegenerateInput, "slabs do not bound a body");
  }
  return BodySpec(dim, std::move(h));
}

BodySpec BodySpec::linear_image(const BodySpec& inner, const Matrix& map) {
  const int n = inner.dim();
  if (map.rows() != n || map.cols() != n)
    throw Error(ErrorKind::InvalidArgument, "linear map has wrong shape");
  if (!map.allFinite()) throw Error(ErrorKind::InvalidArgument, "linear map is not finite");
  Eigen::JacobiSVD<Matrix> svd(map);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0) || sv(0) / smin > kMaxCondition)
    throw Error(ErrorKind::IllConditioned, "linear map condition number exceeds 1e6");

  if (const auto* li = std::get_if<LinearImage>(&inner.kind())) {
    Matrix composed = map * li->map;
    Matrix inverse = li->inverse * map.inverse();
    return BodySpec(n, LinearImage{li->inner, std::move(composed), std::move(inverse)});
  }
  return BodySpec(n, LinearImage{std::make_shared<const BodySpec>(inner), map, map.inverse()});
}

std::string BodySpec::describe() const {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const LpBall& b) {
                   if (b.p.is_infinite())
                     out << "cube(n=" << dim_ << ")";
                   else
                     out << "lp_ball(p=" << b.p.value() << ",n=" << dim_ << ")";
                 },
                 [&](const ScaledL1& b) { out << "scaled_l1(c=" << b.c << ",n=" << dim_ << ")"; },
                 [&](const SymmetricHPolytope& b) {
                   out << "h_polytope(rows=" << b.rows.size() << ",n=" << dim_ << ")";
                 },
                 [&](const LinearImage& b) { out << "linear_image(" << b.inner->describe() << ")"; },
             },
             kind_);
  return out.str();
}

double minkowski_functional(const BodySpec& body, const Vector& x) {
  return std::visit(
      Overloaded{
          [&](const LpBall& b) { return lp_norm(x, b.p); },
          [&](const ScaledL1& b) { return x.lpNorm<1>() / b.c; },
          [&](const SymmetricHPolytope& b) {
            double g = 0.0;
            for (const auto& r : b.rows) g = std::max(g, std::abs(r.normal.dot(x)) / r.offset);
            return g;
          },
          [&](const LinearImage& b) { return minkowski_functional(*b.inner, b.inverse * x); },
      },
      body.kind());
}

double body_volume(const BodySpec& body) {
  const int n = body.dim();
  return std::visit(
      Overloaded{
          [&](const LpBall& b) {
            if (b.p.is_infinite()) return std::ldexp(1.0, n);
            const double p = b.p.value();
            return std::exp(n * std::log(2.0 * std::tgamma(1.0 + 1.0 / p)) - std::lgamma(1.0 + n / p));
          },
          [&](const ScaledL1& b) {
            return std::exp(n * std::log(2.0 * b.c) - log_factorial(n));
          },
          [&](const SymmetricHPolytope& b) -> double {
            if (!b.cache)
              throw Error(ErrorKind::DimensionTooLarge,
                          "exact H-polytope volume limited to n <= " + std::to_string(kMaxExactHullDim));
            return b.cache->volume;
          },
          [&](const LinearImage& b) { return std::abs(b.map.determinant()) * body_volume(*b.inner); },
      },
      body.kind());
}

Matrix body_covariance(const BodySpec& body) {
  const int n = body.dim();
  return std::visit(
      Overloaded{
          [&](const LpBall& b) -> Matrix {
            if (b.p.is_infinite()) return Matrix::Identity(n, n) / 3.0;
            // E x_1^2 = Gamma(3/p) Gamma(1+n/p) / (Gamma(1/p) Gamma(1+(n+2)/p)).
            const double p = b.p.value();
            const double m2 = std::exp(std::lgamma(3.0 / p) + std::lgamma(1.0 + n / p) -
                                       std::lgamma(1.0 / p) - std::lgamma(1.0 + (n + 2.0) / p));
            return Matrix::Identity(n, n) * m2;
          },
          [&](const ScaledL1& b) -> Matrix {
            return Matrix::Identity(n, n) * (b.c * b.c * 2.0 / ((n + 1.0) * (n + 2.0)));
          },
          [&](const SymmetricHPolytope& b) -> Matrix {
            if (!b.cache)
              throw Error(ErrorKind::DimensionTooLarge,
                          "exact H-polytope moments limited to n <= " + std::to_string(kMaxExactHullDim));
            return b.cache->second_moment / b.cache->volume;
          },
          [&](const LinearImage& b) -> Matrix {
            return b.map * body_covariance(*b.inner) * b.map.transpose();
          },
      },
      body.kind());
}

bool is_unconditional(const BodySpec& body) {
  return std::visit(
      Overloaded{
          [](const LpBall&) { return true; },
          [](const ScaledL1&) { return true; },
          [&](const SymmetricHPolytope& b) {
            for (int j = 0; j < body.dim(); ++j) {
              for (const auto& r : b.rows) {
                Vector flipped = r.normal;
                flipped(j) = -flipped(j);
                bool found = false;
                for (const auto& s : b.rows) {
                  if (std::abs(s.offset - r.offset) > 1e-12 * r.offset) continue;
                  if ((s.normal - flipped).norm() <= 1e-12 || (s.normal + flipped).norm() <= 1e-12) {
                    found = true;
                    break;
                  }
                }
                if (!found) return false;
              }
            }
            return true;
          },
          [](const LinearImage& b) { return is_diagonal(b.map) && is_unconditional(*b.inner); },
      },
      body.kind());
}

namespace {

double log_det_spd(const Matrix& cov) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::SingularCovariance, "covariance is not positive definite");
  const Vector diag = llt.matrixL().toDenseMatrix().diagonal();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(diag(i) > 0.0)) throw Error(ErrorKind::SingularCovariance, "covariance is singular");
    logdet += 2.0 * std::log(diag(i));
  }
  return logdet;
}

}  // namespace

IsotropicProfile body_profile(const BodySpec& body) {
  IsotropicProfile profile;
  profile.volume = body_volume(body);
  profile.covariance = body_covariance(body);
  const int n = body.dim();
  profile.isotropic_constant =
      std::exp(log_det_spd(profile.covariance) / (2.0 * n) - std::log(profile.volume) / n);
  profile.is_unconditional = is_unconditional(body);
  return profile;
}

double body_isotropic_constant(const BodySpec& body) { return body_profile(body).isotropic_constant; }

BodySpec isotropic_normalize(const BodySpec& body) {
  const int n = body.dim();
  const double volume = body_volume(body);
  const Matrix cov = body_covariance(body);
  Matrix inv_sqrt(n, n);
  double logdet = 0.0;
  if (is_diagonal(cov)) {
    inv_sqrt.setZero();
    for (int i = 0; i < n; ++i) {
      if (!(cov(i, i) > 0.0)) throw Error(ErrorKind::SingularCovariance, "covariance is singular");
      inv_sqrt(i, i) = 1.0 / std::sqrt(cov(i, i));
      logdet += std::log(cov(i, i));
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    const Vector& lambda = eig.eigenvalues();
    if (!(lambda(0) > 1e-14 * lambda(n - 1)))
      throw Error(ErrorKind::SingularCovariance, "covariance is not positive definite");
    Vector d(n);
    for (int i = 0; i < n; ++i) {
      d(i) = 1.0 / std::sqrt(lambda(i));
      logdet += std::log(lambda(i));
    }
    inv_sqrt = eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
  }
  // a^n det(Cov)^{-1/2} |K| = 1.
  const double a = std::exp((0.5 * logdet - std::log(volume)) / n);
  return BodySpec::linear_image(body, a * inv_sqrt);
}

Matrix random_rotation(int dim, RandomStream& rng) {
  std::normal_distribution<double> normal;
  Matrix g(dim, dim);
  for (int c = 0; c < dim; ++c)
    for (int r = 0; r < dim; ++r) g(r, c) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i)
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  return q;
}

BodySpec rotated_cube(int dim, std::uint64_t rotation_seed) {
  RandomStream rng(rotation_seed, 0x726f74617465ULL);
  const Matrix q = random_rotation(dim, rng);
  return BodySpec::linear_image(BodySpec::cube(dim), 0.5 * q);
}

BodySpec body_from_json(const nlohmann::json& doc) {
  try {
    const std::string kind = doc.at("kind").get<std::string>();
    BodySpec body = [&]() -> BodySpec {
      if (kind == "linear_image") {
        BodySpec inner = body_from_json(doc.at("inner"));
        const auto& rows = doc.at("map");
        const int n = inner.dim();
        if (static_cast<int>(rows.size()) != n) throw Error(ErrorKind::InvalidArgument, "map has wrong shape");
        Matrix t(n, n);
        for (int r = 0; r < n; ++r) {
          if (static_cast<int>(rows[r].size()) != n) throw Error(ErrorKind::InvalidArgument, "map has wrong shape");
          for (int c = 0; c < n; ++c) t(r, c) = rows[r][c].get<double>();
        }
        return BodySpec::linear_image(inner, t);
      }
      const int dim = doc.at("dim").get<int>();
      if (kind == "lp_ball") {
        const auto& p = doc.at("p");
        if (p.is_string()) {
          const auto s = p.get<std::string>();
          if (s != "inf" && s != "infinity") throw Error(ErrorKind::InvalidArgument, "p must be a number or \"inf\"");
          return BodySpec::cube(dim);
        }
        return BodySpec::lp_ball(dim, PNorm::finite(p.get<double>()));
      }
      if (kind == "cube") return BodySpec::cube(dim);
      if (kind == "cross_polytope") return BodySpec::cross_polytope(dim);
      if (kind == "scaled_l1") return BodySpec::scaled_l1(dim, doc.at("c").get<double>());
      if (kind == "rotated_cube") return rotated_cube(dim, doc.value("rotation_seed", std::uint64_t{1}));
      if (kind == "h_polytope") {
        std::vector<Slab> rows;
        for (const auto& r : doc.at("rows")) {
          const auto a = r.at("normal").get<std::vector<double>>();
          rows.push_back(Slab{Eigen::Map<const Vector>(a.data(), static_cast<Eigen::Index>(a.size())),
                              r.at("offset").get<double>()});
        }
        return BodySpec::h_polytope(dim, rows);
      }
      throw Error(ErrorKind::InvalidArgument, "unknown body kind '" + kind + "'");
    }();
    if (doc.value("isotropic", false)) return isotropic_normalize(body);
    return body;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed body document: ") + e.what());
  }
}

nlohmann::json body_to_json(const BodySpec& body) {
  using nlohmann::json;
  json doc;
  std::visit(Overloaded{
                 [&](const LpBall& b) {
                   doc["kind"] = "lp_ball";
                   if (b.p.is_infinite())
                     doc["p"] = "inf";
                   else
                     doc["p"] = b.p.value();
                   doc["dim"] = body.dim();
                 },
                 [&](const ScaledL1& b) {
                   doc["kind"] = "scaled_l1";
                   doc["c"] = b.c;
                   doc["dim"] = body.dim();
                 },
                 [&](const SymmetricHPolytope& b) {
                   doc["kind"] = "h_polytope";
                   doc["dim"] = body.dim();
                   json rows = json::array();
                   for (const auto& r : b.rows)
                     rows.push_back({{"normal", std::vector<double>(r.normal.data(), r.normal.data() + r.normal.size())},
                                     {"offset", r.offset}});
                   doc["rows"] = std::move(rows);
                 },
                 [&](const LinearImage& b) {
                   doc["kind"] = "linear_image";
                   doc["inner"] = body_to_json(*b.inner);
                   json rows = json::array();
                   for (Eigen::Index r = 0; r < b.map.rows(); ++r) {
                     json row = json::array();
                     for (Eigen::Index c = 0; c < b.map.cols(); ++c) row.push_back(b.map(r, c));
                     rows.push_back(std::move(row));
                   }
                   doc["map"] = std::move(rows);
                 },
             },
             body.kind());
  return doc;
}

}  // namespace conehull
