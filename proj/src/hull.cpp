#include "conehull/hull.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <array>
#include <numeric>
#include <string>

#include "conehull/error.hpp"

namespace conehull {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Bounded-size storage keeps the per-facet linear algebra off the heap.
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxExactHullDim,
                                  kMaxExactHullDim>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxExactHullDim, 1>;

struct Ridge {
  std::uint64_t hash = 0;
  std::array<int, kMaxExactHullDim - 1> key{};
  int facet;
  int slot;
};

struct WorkFacet {
  std::vector<int> v;    // vertex ids
  std::vector<int> nbr;  // nbr[k] is the facet across the ridge opposite v[k]
  SmallVector u;         // <u, x> = 1 on the hyperplane
  double u_norm = 0.0;
  double tol = 0.0;      // filter threshold for the floating-point predicate
  bool tol_ready = false;
  int origin_sign = 0;   // exact sign of the lifted determinant at the origin
  std::vector<int> outside;
  bool alive = true;
};

/// Incremental hull of a point set symmetric about the origin. The origin is
/// strictly interior, so no facet hyperplane passes through it and visibility
/// reduces to <u, p> > 1 with u the dual vector of the facet.
class QuickHull {
 public:
  QuickHull(const Matrix& points, bool allow_non_simplicial)
      : pts_(points),
        n_(static_cast<int>(points.rows())),
        allow_non_simplicial_(allow_non_simplicial) {
    norms_.resize(pts_.cols());
    for (Eigen::Index i = 0; i < pts_.cols(); ++i) norms_[i] = pts_.col(i).norm();
  }

  void run(const std::vector<int>& negation) {
    seed(negation);
    std::vector<int> pending;
    for (int f = 0; f < static_cast<int>(facets_.size()); ++f)
      if (!facets_[f].outside.empty()) pending.push_back(f);
    while (!pending.empty()) {
      const int f = pending.back();
      pending.pop_back();
      if (!facets_[f].alive || facets_[f].outside.empty()) continue;
      add_point(f, pending);
    }
    check_simplicial();
  }

  std::vector<const WorkFacet*> alive_facets() const {
    std::vector<const WorkFacet*> out;
    for (const auto& f : facets_)
      if (f.alive) out.push_back(&f);
    return out;
  }

  bool simplicial() const { return simplicial_; }

 private:
  void seed(const std::vector<int>& negation) {
    // Greedy well-conditioned basis: largest residual against the span so far.
    const int m = static_cast<int>(pts_.cols());
    std::vector<int> basis;
    Matrix q(n_, 0);
    double scale = 0.0;
    for (int i = 0; i < m; ++i) scale = std::max(scale, norms_[i]);
    if (scale == 0.0) throw Error(ErrorKind::DegenerateInput, "all points are zero");
    for (int k = 0; k < n_; ++k) {
      int best = -1;
      double best_res = 0.0;
      for (int i = 0; i < m; ++i) {
        Vector r = pts_.col(i);
        if (q.cols() > 0) r -= q * (q.transpose() * r);
        const double res = r.norm();
        if (res > best_res) {
          best_res = res;
          best = i;
        }
      }
      if (best < 0 || best_res <= 1e-10 * scale)
        throw Error(ErrorKind::DegenerateInput,
                    "points span a subspace of dimension " + std::to_string(k) +
                        " < " + std::to_string(n_));
      Vector r = pts_.col(best);
      if (q.cols() > 0) r -= q * (q.transpose() * r);
      q.conservativeResize(n_, k + 1);
      q.col(k) = r / r.norm();
      basis.push_back(best);
    }

    const int count = 1 << n_;
    facets_.resize(count);
    for (int mask = 0; mask < count; ++mask) {
      WorkFacet& f = facets_[mask];
      f.v.resize(n_);
      f.nbr.resize(n_);
      for (int k = 0; k < n_; ++k) {
        f.v[k] = (mask >> k & 1) ? negation[basis[k]] : basis[k];
        f.nbr[k] = mask ^ (1 << k);
      }
      compute_plane(f);
    }
    std::vector<char> used(m, 0);
    for (int b : basis) used[b] = used[negation[b]] = 1;
    std::vector<int> all(count);
    std::iota(all.begin(), all.end(), 0);
    for (int i = 0; i < m; ++i)
      if (!used[i]) assign(i, all);
  }

  void compute_plane(WorkFacet& f) const {
    Eigen::PartialPivLU<SmallMatrix> lu(vertex_rows(f));
    f.u = lu.solve(SmallVector::Ones(n_));
    f.u_norm = f.u.norm();
    f.tol_ready = false;
    if (!std::isfinite(f.u_norm)) {
      f.u.setZero();
      f.u_norm = 0.0;
      f.tol = std::numeric_limits<double>::infinity();
      f.tol_ready = true;
      return;
    }
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    if (pivots.minCoeff() < 1e-6 * pivots.maxCoeff()) set_tolerance(f, lu);
  }

  SmallMatrix vertex_rows(const WorkFacet& f) const {
    SmallMatrix a(n_, n_);
    for (int k = 0; k < n_; ++k) a.row(k) = pts_.col(f.v[k]).transpose();
    return a;
  }

  void set_tolerance(WorkFacet& f, const Eigen::PartialPivLU<SmallMatrix>& lu) const {
    const double rcond = lu.rcond();
    f.tol = rcond > 1e-14 ? 256.0 * n_ * kEps / rcond : std::numeric_limits<double>::infinity();
    f.tol_ready = true;
  }

  double tolerance(WorkFacet& f) const {
    if (!f.tol_ready) set_tolerance(f, Eigen::PartialPivLU<SmallMatrix>(vertex_rows(f)));
    return f.tol;
  }

  int exact_origin_sign(WorkFacet& f) const {
    if (f.origin_sign == 0) {
      RationalMatrix m(n_ + 1);
      for (int k = 0; k < n_; ++k) {
        for (int c = 0; c < n_; ++c) m(k, c) = to_rational(pts_(c, f.v[k]));
        m(k, n_) = 1;
      }
      for (int c = 0; c < n_; ++c) m(n_, c) = 0;
      m(n_, n_) = 1;
      f.origin_sign = sign(exact_determinant(std::move(m)));
      if (f.origin_sign == 0)
        throw Error(ErrorKind::DegenerateInput, "facet hyperplane contains the origin");
    }
    return f.origin_sign;
  }

  /// +1 if p is strictly beyond the facet, 0 if on its hyperplane, -1 otherwise.
  int side(int p, WorkFacet& f) {
    const double s = f.u.dot(pts_.col(p)) - 1.0;
    const double scale = f.u_norm * norms_[p] + 1.0;
    // Well-conditioned facets (pivot check passed) decide far-away points
    // without the condition estimate.
    if (!f.tol_ready && std::abs(s) > 1e-3 * scale) return s > 0 ? 1 : -1;
    const double tol = tolerance(f);
    if (std::isfinite(tol)) {
      if (s > tol * scale) return 1;
      if (s < -tol * scale) return -1;
    }
    RationalMatrix m(n_ + 1);
    for (int k = 0; k < n_; ++k) {
      for (int c = 0; c < n_; ++c) m(k, c) = to_rational(pts_(c, f.v[k]));
      m(k, n_) = 1;
    }
    for (int c = 0; c < n_; ++c) m(n_, c) = to_rational(pts_(c, p));
    m(n_, n_) = 1;
    const int sp = sign(exact_determinant(std::move(m)));
    if (sp == 0) return 0;
    return sp == exact_origin_sign(f) ? -1 : 1;
  }

  double distance(int p, const WorkFacet& f) const {
    if (f.u_norm == 0.0) return 0.0;
    return (f.u.dot(pts_.col(p)) - 1.0) / f.u_norm;
  }

  void assign(int p, const std::vector<int>& candidates) {
    int best = -1;
    double best_dist = -std::numeric_limits<double>::infinity();
    for (int f : candidates) {
      if (side(p, facets_[f]) <= 0) continue;
      const double d = distance(p, facets_[f]);
      if (d > best_dist) {
        best_dist = d;
        best = f;
      }
    }
    if (best >= 0) facets_[best].outside.push_back(p);
  }

  void add_point(int start, std::vector<int>& pending) {
    WorkFacet& sf = facets_[start];
    int p = sf.outside.front();
    double far = distance(p, sf);
    for (int q : sf.outside) {
      const double d = distance(q, sf);
      if (d > far) {
        far = d;
        p = q;
      }
    }

    ++epoch_;
    grow_marks();
    std::vector<int> visible{start};
    std::vector<std::pair<int, int>> horizon;  // (visible facet, ridge index)
    mark_[start] = epoch_;
    is_visible_[start] = 1;
    for (std::size_t head = 0; head < visible.size(); ++head) {
      const int f = visible[head];
      for (int k = 0; k < n_; ++k) {
        const int g = facets_[f].nbr[k];
        if (mark_[g] != epoch_) {
          mark_[g] = epoch_;
          is_visible_[g] = side(p, facets_[g]) > 0;
          if (is_visible_[g]) visible.push_back(g);
        }
        if (!is_visible_[g]) horizon.emplace_back(f, k);
      }
    }

    // New cone of facets from the horizon ridges to p.
    std::vector<int> created;
    std::vector<Ridge> ridges;
    for (const auto& [f, k] : horizon) {
      WorkFacet nf;
      nf.v = facets_[f].v;
      nf.v[k] = p;
      nf.nbr.assign(n_, -1);
      const int g = facets_[f].nbr[k];
      nf.nbr[k] = g;
      compute_plane(nf);
      const int id = static_cast<int>(facets_.size());
      facets_.push_back(std::move(nf));
      created.push_back(id);
      auto& gn = facets_[g].nbr;
      *std::find(gn.begin(), gn.end(), f) = id;

      for (int j = 0; j < n_; ++j) {
        if (j == k) continue;
        Ridge r{0, {}, id, j};
        int c = 0;
        for (int i = 0; i < n_; ++i)
          if (i != j) r.key[c++] = facets_[id].v[i];
        std::sort(r.key.begin(), r.key.begin() + c);
        for (int i = 0; i < c; ++i) r.hash = (r.hash ^ static_cast<std::uint64_t>(r.key[i])) * 0x100000001b3ull;
        ridges.push_back(r);
      }
    }
    // Each interior ridge of the new cone is shared by exactly two new facets.
    std::sort(ridges.begin(), ridges.end(),
              [](const Ridge& a, const Ridge& b) {
                return a.hash != b.hash ? a.hash < b.hash : a.key < b.key;
              });
    if (ridges.size() % 2 != 0)
      throw Error(ErrorKind::DegenerateInput, "inconsistent horizon while adding a point");
    for (std::size_t i = 0; i < ridges.size(); i += 2) {
      const Ridge& a = ridges[i];
      const Ridge& b = ridges[i + 1];
      if (a.key != b.key || (i + 2 < ridges.size() && ridges[i + 2].key == a.key))
        throw Error(ErrorKind::DegenerateInput, "inconsistent horizon while adding a point");
      facets_[a.facet].nbr[a.slot] = b.facet;
      facets_[b.facet].nbr[b.slot] = a.facet;
    }

    std::vector<int> orphans;
    for (int f : visible) {
      WorkFacet& vf = facets_[f];
      for (int q : vf.outside)
        if (q != p) orphans.push_back(q);
      vf.outside.clear();
      vf.outside.shrink_to_fit();
      vf.alive = false;
    }
    grow_marks();
    for (int q : orphans) assign(q, created);
    for (int f : created)
      if (!facets_[f].outside.empty()) pending.push_back(f);
  }

  void grow_marks() {
    if (mark_.size() < facets_.size()) {
      mark_.resize(facets_.size() * 2 + 16, 0);
      is_visible_.resize(mark_.size(), 0);
    }
  }

  void check_simplicial() {
    for (auto& f : facets_) {
      if (!f.alive) continue;
      for (int k = 0; k < n_; ++k) {
        const WorkFacet& g = facets_[f.nbr[k]];
        int w = -1;
        for (int x : g.v)
          if (std::find(f.v.begin(), f.v.end(), x) == f.v.end()) w = x;
        if (w >= 0 && side(w, f) == 0) {
          simplicial_ = false;
          if (allow_non_simplicial_) return;
          throw Error(ErrorKind::NonSimplicialFacet,
                      "adjacent facets are coplanar (input not in general position)");
        }
      }
    }
  }

  const Matrix& pts_;
  int n_;
  bool allow_non_simplicial_;
  std::vector<double> norms_;
  std::vector<WorkFacet> facets_;
  std::vector<unsigned> mark_;       // epoch in which a facet was classified
  std::vector<char> is_visible_;     // classification result for that epoch
  unsigned epoch_ = 0;
  bool simplicial_ = true;
};

Vector canonical(Vector x) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) == 0.0) x(i) = 0.0;  // drop the sign of negative zero
  return x;
}

double factorial_double(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

SmallMatrix facet_matrix(const SymmetricPolytope& p, const Facet& f) {
  SmallMatrix y(p.dim, p.dim);
  for (int k = 0; k < p.dim; ++k) y.col(k) = p.points.col(f.vertices[k]);
  return y;
}

}  // namespace

std::vector<int> SymmetricPolytope::vertex_indices() const {
  std::vector<int> ids;
  for (const auto& f : facets) ids.insert(ids.end(), f.vertices.begin(), f.vertices.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

int SymmetricPolytope::vertex_count() const {
  return static_cast<int>(vertex_indices().size());
}

double SymmetricPolytope::gauge(const Vector& x) const {
  double g = 0.0;
  for (const auto& f : facets) g = std::max(g, f.normal.dot(x) / f.offset);
  return g;
}

SymmetricPolytope build_hull(const Matrix& generators, const HullOptions& options) {
  const int n = static_cast<int>(generators.rows());
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  if (n > kMaxExactHullDim)
    throw Error(ErrorKind::DimensionTooLarge,
                "exact hull limited to n <= " + std::to_string(kMaxExactHullDim));
  if (!generators.allFinite())
    throw Error(ErrorKind::InvalidArgument, "non-finite generator");

  SymmetricPolytope poly;
  poly.dim = n;
  poly.generators = generators;

  // De-duplicate +-X_i exactly; remember the antipode of every point.
  std::vector<Vector> unique;
  auto index_of = [&](const Vector& x) {
    for (std::size_t i = 0; i < unique.size(); ++i)
      if (unique[i] == x) return static_cast<int>(i);
    unique.push_back(x);
    return static_cast<int>(unique.size() - 1);
  };
  std::vector<std::pair<int, int>> pairs;
  for (Eigen::Index i = 0; i < generators.cols(); ++i) {
    const Vector x = canonical(generators.col(i));
    if (x.isZero(0.0)) continue;
    const int a = index_of(x);
    const int b = index_of(canonical(-x));
    pairs.emplace_back(a, b);
  }
  poly.points.resize(n, static_cast<Eigen::Index>(unique.size()));
  for (std::size_t i = 0; i < unique.size(); ++i) poly.points.col(i) = unique[i];
  poly.negation.assign(unique.size(), -1);
  for (auto [a, b] : pairs) {
    poly.negation[a] = b;
    poly.negation[b] = a;
  }
  if (unique.empty()) throw Error(ErrorKind::DegenerateInput, "no nonzero generators");

  QuickHull hull(poly.points, options.allow_non_simplicial);
  hull.run(poly.negation);
  for (const WorkFacet* wf : hull.alive_facets()) {
    Facet f;
    f.vertices = wf->v;
    f.offset = 1.0 / wf->u_norm;
    f.normal = wf->u / wf->u_norm;
    poly.facets.push_back(std::move(f));
  }
  poly.simplicial = hull.simplicial();
  poly.volume = polytope_volume(poly);
  poly.second_moment = polytope_covariance(poly);
  return poly;
}

SymmetricPolytope build_hull(const SampleBatch& batch, const HullOptions& options) {
  return build_hull(batch.points, options);
}

double polytope_volume(const SymmetricPolytope& polytope) {
  double sum = 0.0;
  for (const auto& f : polytope.facets)
    sum += std::abs(facet_matrix(polytope, f).determinant());
  return sum / factorial_double(polytope.dim);
}

Matrix polytope_covariance(const SymmetricPolytope& polytope) {
  const int n = polytope.dim;
  Matrix total = Matrix::Zero(n, n);
  const double scale = 1.0 / (factorial_double(n) * (n + 1) * (n + 2));
  for (const auto& f : polytope.facets) {
    const SmallMatrix y = facet_matrix(polytope, f);
    const double vol = std::abs(y.determinant());
    const SmallVector s = y.rowwise().sum();
    total += vol * (y * y.transpose() + s * s.transpose());
  }
  return total * scale;
}

Rational polytope_volume_exact(const SymmetricPolytope& polytope) {
  Rational sum = 0;
  for (const auto& f : polytope.facets) sum += abs(exact_determinant(facet_matrix(polytope, f)));
  return sum / factorial(polytope.dim);
}

std::vector<Rational> polytope_covariance_exact(const SymmetricPolytope& polytope) {
  const int n = polytope.dim;
  std::vector<Rational> total(static_cast<std::size_t>(n) * n, Rational(0));
  for (const auto& f : polytope.facets) {
    const Matrix y = facet_matrix(polytope, f);
    const Rational vol = abs(exact_determinant(y));
    std::vector<Rational> s(n, Rational(0));
    std::vector<Rational> yq(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k)
      for (int r = 0; r < n; ++r) {
        yq[static_cast<std::size_t>(r) * n + k] = to_rational(y(r, k));
        s[r] += yq[static_cast<std::size_t>(r) * n + k];
      }
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        Rational acc = s[r] * s[c];
        for (int k = 0; k < n; ++k)
          acc += yq[static_cast<std::size_t>(r) * n + k] * yq[static_cast<std::size_t>(c) * n + k];
        total[static_cast<std::size_t>(r) * n + c] += vol * acc;
      }
  }
  const Rational scale = Rational(1) / (factorial(n) * (n + 1) * (n + 2));
  for (auto& x : total) x *= scale;
  return total;
}

namespace {

/// Integral of max(f, 0) over a simplex S on which f is linear with vertex
/// values f_0..f_n, divided by n! |S|. By Hermite-Genocchi this is the
/// divided difference of t_+^{n+1} / (n+1)! at the vertex values; repeated
/// values use the derivative form of the divided difference.
Rational positive_part_integral(std::vector<Rational> f) {
  const int m = static_cast<int>(f.size());  // n + 1
  std::sort(f.begin(), f.end());
  auto confluent = [&](const Rational& t, int k) -> Rational {
    if (sgn(t) <= 0) return 0;
    Rational power = 1;
    for (int e = 0; e < m - k; ++e) power *= t;
    return power / (factorial(static_cast<unsigned long>(m - k)) * factorial(static_cast<unsigned long>(k)));
  };
  std::vector<Rational> dd(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) dd[i] = confluent(f[i], 0);
  for (int k = 1; k < m; ++k)
    for (int i = 0; i + k < m; ++i)
      dd[i] = f[i + k] == f[i] ? confluent(f[i], k) : Rational((dd[i + 1] - dd[i]) / (f[i + k] - f[i]));
  return dd[0];
}

}  // namespace

IntegralEstimate integral_l1(const SymmetricPolytope& polytope, IntegralMode mode,
                             RandomStream* rng, std::size_t samples) {
  const int n = polytope.dim;
  IntegralEstimate est;
  if (mode == IntegralMode::Exact) {
    if (n > kMaxExactL1Dim)
      throw Error(ErrorKind::DimensionTooLarge,
                  "exact 1-norm integral limited to n <= " + std::to_string(kMaxExactL1Dim));
    // int_S |f| = 2 int_S f_+ - int_S f on each cone simplex conv{0, facet}.
    Rational total = 0;
    std::vector<Rational> values(static_cast<std::size_t>(n) + 1);
    for (const auto& f : polytope.facets) {
      const Rational volume_nfact = abs(exact_determinant(facet_matrix(polytope, f)));
      Rational sum = 0;
      for (int c = 0; c < n; ++c) {
        values[0] = 0;
        Rational linear = 0;
        for (int k = 0; k < n; ++k) {
          values[k + 1] = to_rational(polytope.points(c, f.vertices[k]));
          linear += values[k + 1];
        }
        sum += 2 * positive_part_integral(values) - linear / factorial(static_cast<unsigned long>(n) + 1);
      }
      total += volume_nfact * sum;
    }
    est.value = total.get_d();
    est.exact = true;
    return est;
  }
  if (rng == nullptr) throw Error(ErrorKind::InvalidArgument, "Monte Carlo mode needs a stream");
  if (samples < 2) throw Error(ErrorKind::InvalidArgument, "need at least two samples");
  const Matrix x = sample_in_polytope(polytope, samples, *rng);
  double mean = 0.0, m2 = 0.0;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    const double v = x.col(i).lpNorm<1>();
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  est.value = polytope.volume * mean;
  est.standard_error = polytope.volume * std::sqrt(var / static_cast<double>(samples));
  est.samples = samples;
  return est;
}

double facet_sign_sum_max(const SymmetricPolytope& polytope, SignNorm norm) {
  const int n = polytope.dim;
  const unsigned count = 1u << (n - 1);
  double best = 0.0;
  Vector sum(n);
  std::vector<int> eps(n);
  for (const auto& f : polytope.facets) {
    const Matrix y = facet_matrix(polytope, f);
    sum = y.rowwise().sum();
    std::fill(eps.begin(), eps.end(), 1);
    auto evaluate = [&] {
      const double v = norm == SignNorm::L1 ? sum.lpNorm<1>() : sum.squaredNorm();
      best = std::max(best, v);
    };
    evaluate();
    // Gray code over eps_2..eps_n; eps_1 stays +1 since eps and -eps agree.
    for (unsigned i = 1; i < count; ++i) {
      const int j = std::countr_zero(i) + 1;
      sum -= (2.0 * eps[j]) * y.col(j);
      eps[j] = -eps[j];
      evaluate();
    }
  }
  return best;
}

Matrix sample_in_polytope(const SymmetricPolytope& polytope, std::size_t count,
                          RandomStream& rng) {
  const int n = polytope.dim;
  std::vector<double> cumulative;
  cumulative.reserve(polytope.facets.size());
  double total = 0.0;
  for (const auto& f : polytope.facets) {
    total += std::abs(facet_matrix(polytope, f).determinant());
    cumulative.push_back(total);
  }
  Matrix out(n, static_cast<Eigen::Index>(count));
  std::vector<double> w(n + 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double target = uniform01(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    if (it == cumulative.end()) --it;
    const Facet& f = polytope.facets[static_cast<std::size_t>(it - cumulative.begin())];
    // Flat Dirichlet weights on the cone simplex conv{0, y_1, ..., y_n}.
    double s = 0.0;
    for (auto& x : w) {
      x = -std::log(uniform01(rng));
      s += x;
    }
    Vector p = Vector::Zero(n);
    for (int k = 0; k < n; ++k) p += (w[k + 1] / s) * polytope.points.col(f.vertices[k]);
    out.col(static_cast<Eigen::Index>(i)) = p;
  }
  return out;
}

nlohmann::json polytope_to_json(const SymmetricPolytope& polytope) {
  using nlohmann::json;
  auto columns = [](const Matrix& m) {
    json arr = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      json col = json::array();
      for (Eigen::Index r = 0; r < m.rows(); ++r) col.push_back(m(r, c));
      arr.push_back(std::move(col));
    }
    return arr;
  };
  json doc;
  doc["dim"] = polytope.dim;
  doc["generators"] = columns(polytope.generators);
  doc["points"] = columns(polytope.points);
  doc["negation"] = polytope.negation;
  json facets = json::array();
  for (const auto& f : polytope.facets) {
    json jf;
    jf["vertices"] = f.vertices;
    jf["normal"] = std::vector<double>(f.normal.data(), f.normal.data() + f.normal.size());
    jf["offset"] = f.offset;
    facets.push_back(std::move(jf));
  }
  doc["facets"] = std::move(facets);
  doc["volume"] = polytope.volume;
  json cov = json::array();
  for (Eigen::Index r = 0; r < polytope.second_moment.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < polytope.second_moment.cols(); ++c)
      row.push_back(polytope.second_moment(r, c));
    cov.push_back(std::move(row));
  }
  doc["second_moment"] = std::move(cov);
  doc["simplicial"] = polytope.simplicial;
  return doc;
}

SymmetricPolytope polytope_from_json(const nlohmann::json& doc) {
  SymmetricPolytope p;
  try {
    p.dim = doc.at("dim").get<int>();
    auto read_columns = [&](const nlohmann::json& arr) {
      Matrix m(p.dim, static_cast<Eigen::Index>(arr.size()));
      for (std::size_t c = 0; c < arr.size(); ++c) {
        if (static_cast<int>(arr[c].size()) != p.dim)
          throw Error(ErrorKind::InvalidArgument, "point has wrong dimension");
        for (int r = 0; r < p.dim; ++r) m(r, static_cast<Eigen::Index>(c)) = arr[c][r].get<double>();
      }
      return m;
    };
    p.generators = read_columns(doc.at("generators"));
    p.points = read_columns(doc.at("points"));
    p.negation = doc.at("negation").get<std::vector<int>>();
    for (const auto& jf : doc.at("facets")) {
      Facet f;
      f.vertices = jf.at("vertices").get<std::vector<int>>();
      const auto normal = jf.at("normal").get<std::vector<double>>();
      f.normal = Eigen::Map<const Vector>(normal.data(), static_cast<Eigen::Index>(normal.size()));
      f.offset = jf.at("offset").get<double>();
      if (static_cast<int>(f.vertices.size()) != p.dim || f.normal.size() != p.dim)
        throw Error(ErrorKind::InvalidArgument, "facet has wrong dimension");
      for (int v : f.vertices)
        if (v < 0 || v >= p.points.cols())
          throw Error(ErrorKind::InvalidArgument, "facet vertex index out of range");
      p.facets.push_back(std::move(f));
    }
    p.simplicial = doc.value("simplicial", true);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed polytope document: ") + e.what());
  }
  p.volume = polytope_volume(p);
  p.second_moment = polytope_covariance(p);
  return p;
}

}  // namespace conehull
