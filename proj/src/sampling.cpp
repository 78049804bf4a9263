#include "conehull/sampling.hpp"
#include "conehull/overloaded.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "conehull/error.hpp"

namespace conehull {
namespace {

struct BatchFlags {
  bool mc_approximate = false;
};

/// Density proportional to exp(-|t|^p): |G|^p ~ Gamma(1/p, 1), symmetric sign.
double generalized_normal(double p, RandomStream& rng) {
  double magnitude;
  if (p == 1.0) {
    magnitude = -std::log(uniform01(rng));
  } else {
    std::gamma_distribution<double> gamma(1.0 / p, 1.0);
    magnitude = std::pow(gamma(rng), 1.0 / p);
  }
  return (rng() & 1u) ? magnitude : -magnitude;
}

double random_sign(RandomStream& rng) { return (rng() & 1u) ? 1.0 : -1.0; }

Matrix lp_uniform(int n, PNorm p, std::size_t count, RandomStream& rng) {
  Matrix out(n, static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    auto col = out.col(static_cast<Eigen::Index>(i));
    if (p.is_infinite()) {
      for (int j = 0; j < n; ++j) col(j) = 2.0 * uniform01(rng) - 1.0;
      continue;
    }
    // G / (||G||_p^p + E)^{1/p} is uniform in B_p^n.
    const double q = p.value();
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      col(j) = generalized_normal(q, rng);
      s += std::pow(std::abs(col(j)), q);
    }
    s += -std::log(uniform01(rng));
    col /= std::pow(s, 1.0 / q);
  }
  return out;
}

Matrix lp_cone(int n, PNorm p, std::size_t count, RandomStream& rng) {
  Matrix out(n, static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    auto col = out.col(static_cast<Eigen::Index>(i));
    if (p.is_infinite()) {
      // The cone measure of the cube is uniform on its 2n facets.
      const auto face = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n)));
      for (int j = 0; j < n; ++j) col(j) = 2.0 * uniform01(rng) - 1.0;
      col(face) = random_sign(rng);
      continue;
    }
    const double q = p.value();
    Vector g(n);
    for (int j = 0; j < n; ++j) g(j) = generalized_normal(q, rng);
    const double norm = lp_norm(g, p);
    if (norm == 0.0) {
      --i;
      continue;
    }
    col = g / norm;
  }
  return out;
}

Matrix hit_and_run(const SymmetricHPolytope& h, int n, std::size_t count, RandomStream& rng) {
  std::normal_distribution<double> normal;
  Vector x = Vector::Zero(n);
  Vector d(n);
  auto step = [&] {
    do {
      for (int j = 0; j < n; ++j) d(j) = normal(rng);
    } while (d.squaredNorm() == 0.0);
    d.normalize();
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& r : h.rows) {
      const double ad = r.normal.dot(d);
      if (ad == 0.0) continue;
      const double ax = r.normal.dot(x);
      double t0 = (-r.offset - ax) / ad;
      double t1 = (r.offset - ax) / ad;
      if (t0 > t1) std::swap(t0, t1);
      lo = std::max(lo, t0);
      hi = std::min(hi, t1);
    }
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
      throw Error(ErrorKind::DegenerateInput, "hit-and-run chord is unbounded or empty");
    x += (lo + uniform01(rng) * (hi - lo)) * d;
  };
  for (int s = 0; s < hit_and_run_burn_in(n); ++s) step();
  Matrix out(n, static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    for (int s = 0; s < hit_and_run_thinning(n); ++s) step();
    out.col(static_cast<Eigen::Index>(i)) = x;
  }
  return out;
}

Matrix uniform_points(const BodySpec& body, std::size_t count, RandomStream& rng,
                      const SamplerOptions& options, BatchFlags& flags) {
  const int n = body.dim();
  return std::visit(
      Overloaded{
          [&](const LpBall& b) { return lp_uniform(n, b.p, count, rng); },
          [&](const ScaledL1& b) -> Matrix {
            return b.c * lp_uniform(n, PNorm::finite(1.0), count, rng);
          },
          [&](const SymmetricHPolytope& h) -> Matrix {
            double acceptance = 0.0;
            if (h.cache) acceptance = h.cache->volume / std::ldexp(h.cache->half_widths.prod(), n);
            if (h.cache && acceptance >= options.min_acceptance) {
              Matrix out(n, static_cast<Eigen::Index>(count));
              Vector x(n);
              for (std::size_t i = 0; i < count;) {
                for (int j = 0; j < n; ++j)
                  x(j) = (2.0 * uniform01(rng) - 1.0) * h.cache->half_widths(j);
                if (minkowski_functional(body, x) <= 1.0) out.col(static_cast<Eigen::Index>(i++)) = x;
              }
              return out;
            }
            if (!options.allow_hit_and_run)
              throw Error(ErrorKind::AcceptanceTooLow,
                          "bounding-box rejection infeasible and hit-and-run disabled");
            flags.mc_approximate = true;
            return hit_and_run(h, n, count, rng);
          },
          [&](const LinearImage& b) -> Matrix {
            return b.map * uniform_points(*b.inner, count, rng, options, flags);
          },
      },
      body.kind());
}

bool has_direct_cone(const BodySpec& body) {
  return std::visit(Overloaded{
                        [](const LpBall&) { return true; },
                        [](const ScaledL1&) { return true; },
                        [](const SymmetricHPolytope&) { return false; },
                        [](const LinearImage& b) { return has_direct_cone(*b.inner); },
                    },
                    body.kind());
}

Matrix direct_cone_points(const BodySpec& body, std::size_t count, RandomStream& rng) {
  const int n = body.dim();
  return std::visit(
      Overloaded{
          [&](const LpBall& b) { return lp_cone(n, b.p, count, rng); },
          [&](const ScaledL1& b) -> Matrix { return b.c * lp_cone(n, PNorm::finite(1.0), count, rng); },
          [&](const SymmetricHPolytope&) -> Matrix {
            throw Error(ErrorKind::InvalidArgument, "no direct cone generator for H-polytopes");
          },
          [&](const LinearImage& b) -> Matrix { return b.map * direct_cone_points(*b.inner, count, rng); },
      },
      body.kind());
}

/// Replaces exact-origin columns by fresh draws and counts them.
std::size_t redraw_zeros(const BodySpec& body, Matrix& y, RandomStream& rng,
                         const SamplerOptions& options, BatchFlags& flags) {
  std::size_t redraws = 0;
  for (Eigen::Index i = 0; i < y.cols(); ++i) {
    while (minkowski_functional(body, y.col(i)) == 0.0) {
      y.col(i) = uniform_points(body, 1, rng, options, flags).col(0);
      ++redraws;
    }
  }
  return redraws;
}

Matrix project_to_boundary(const BodySpec& body, const Matrix& y) {
  Matrix x(y.rows(), y.cols());
  for (Eigen::Index i = 0; i < y.cols(); ++i) x.col(i) = y.col(i) / minkowski_functional(body, y.col(i));
  return x;
}

void require_count(std::size_t count) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "count must be at least 1");
}

}  // namespace

std::string to_string(Distribution d) {
  return d == Distribution::UniformInBody ? "uniform" : "cone";
}

int hit_and_run_burn_in(int dim) { return 10 * dim * dim; }
int hit_and_run_thinning(int dim) { return dim * dim; }

SampleBatch sample_uniform(const BodySpec& body, std::size_t count, RandomStream& rng,
                           const SamplerOptions& options) {
  require_count(count);
  BatchFlags flags;
  Matrix points = uniform_points(body, count, rng, options, flags);
  return SampleBatch{Distribution::UniformInBody, body, std::move(points), rng.seed(),
                     rng.stream_id(), flags.mc_approximate, 0};
}

SampleBatch sample_cone_boundary(const BodySpec& body, std::size_t count, RandomStream& rng,
                                 const SamplerOptions& options) {
  require_count(count);
  bool direct = false;
  switch (options.cone_method) {
    case ConeMethod::Auto: direct = has_direct_cone(body); break;
    case ConeMethod::Direct:
      if (!has_direct_cone(body))
        throw Error(ErrorKind::InvalidArgument, "direct cone generator unavailable for " + body.describe());
      direct = true;
      break;
    case ConeMethod::Projection: direct = false; break;
  }
  BatchFlags flags;
  SampleBatch batch{Distribution::ConeOnBoundary, body, Matrix(), rng.seed(), rng.stream_id(), false, 0};
  if (direct) {
    batch.points = direct_cone_points(body, count, rng);
  } else {
    Matrix y = uniform_points(body, count, rng, options, flags);
    batch.zero_redraws = redraw_zeros(body, y, rng, options, flags);
    batch.points = project_to_boundary(body, y);
  }
  batch.mc_approximate = flags.mc_approximate;
  return batch;
}

std::pair<SampleBatch, SampleBatch> sample_coupled_pair(const BodySpec& body, std::size_t count,
                                                        RandomStream& rng, const SamplerOptions& options) {
  require_count(count);
  BatchFlags flags;
  Matrix y = uniform_points(body, count, rng, options, flags);
  const std::size_t redraws = redraw_zeros(body, y, rng, options, flags);
  Matrix x = project_to_boundary(body, y);
  SampleBatch uniform{Distribution::UniformInBody, body, std::move(y), rng.seed(), rng.stream_id(),
                      flags.mc_approximate, redraws};
  SampleBatch cone{Distribution::ConeOnBoundary, body, std::move(x), rng.seed(), rng.stream_id(),
                   flags.mc_approximate, redraws};
  return {std::move(uniform), std::move(cone)};
}

void write_batch_csv(const SampleBatch& batch, std::ostream& out) {
  nlohmann::json header;
  header["body"] = body_to_json(batch.body);
  header["seed"] = batch.seed;
  header["stream"] = batch.stream_id;
  header["distribution"] = to_string(batch.distribution);
  header["dim"] = batch.dim();
  header["count"] = batch.count();
  header["mc_approximate"] = batch.mc_approximate;
  out << "# " << header.dump() << '\n';
  for (int j = 0; j < batch.dim(); ++j) out << (j ? "," : "") << 'x' << (j + 1);
  out << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < batch.points.cols(); ++i) {
    for (Eigen::Index j = 0; j < batch.points.rows(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", batch.points(j, i));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

SampleBatch read_batch_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw Error(ErrorKind::InvalidArgument, "batch CSV must start with a '# {json}' header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line.substr(2));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad batch header: ") + e.what());
  }
  const BodySpec body = body_from_json(header.at("body"));
  const int dim = header.at("dim").get<int>();
  std::getline(in, line);  // column names
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int cols = 0;
    while (std::getline(ss, cell, ',')) {
      values.push_back(std::stod(cell));
      ++cols;
    }
    if (cols != dim) throw Error(ErrorKind::InvalidArgument, "row has wrong number of coordinates");
    ++rows;
  }
  Matrix points = Eigen::Map<const Matrix>(values.data(), dim, static_cast<Eigen::Index>(rows));
  const auto dist = header.at("distribution").get<std::string>() == "uniform" ? Distribution::UniformInBody
                                                                              : Distribution::ConeOnBoundary;
  return SampleBatch{dist,
                     body,
                     std::move(points),
                     header.at("seed").get<std::uint64_t>(),
                     header.at("stream").get<std::uint64_t>(),
                     header.value("mc_approximate", false),
                     0};
}

}  // namespace conehull
