#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>

#include "conehull/body.hpp"
#include "conehull/rng.hpp"
#include "conehull/types.hpp"

namespace conehull {

enum class Distribution { UniformInBody, ConeOnBoundary };

std::string to_string(Distribution d);

enum class ConeMethod {
  Auto,        ///< direct generator where one exists, projection otherwise
  Projection,  ///< Y uniform in K, X = Y / ||Y||_K
  Direct,      ///< p-generalized normals normalized by their l_p norm
};

struct SamplerOptions {
  ConeMethod cone_method = ConeMethod::Auto;
  bool allow_hit_and_run = true;
  /// Rejection from the bounding box is used while |K| / |box| stays above this.
  double min_acceptance = 1e-4;
};

struct SampleBatch {
  Distribution distribution;
  BodySpec body;
  Matrix points;  ///< one point per column
  std::uint64_t seed;
  std::uint64_t stream_id;
  /// True when a Markov chain (hit-and-run) produced the points.
  bool mc_approximate = false;
  /// Number of exact-origin draws that were redrawn.
  std::size_t zero_redraws = 0;

  int dim() const { return static_cast<int>(points.rows()); }
  std::size_t count() const { return static_cast<std::size_t>(points.cols()); }
};

SampleBatch sample_uniform(const BodySpec& body, std::size_t count,
                           RandomStream& rng, const SamplerOptions& options = {});

SampleBatch sample_cone_boundary(const BodySpec& body, std::size_t count,
                                 RandomStream& rng,
                                 const SamplerOptions& options = {});

/// (Y, X) with X_i = Y_i / ||Y_i||_K drawn on one probability space, so
/// conv{+-Y} is contained in conv{+-X} for every realization.
std::pair<SampleBatch, SampleBatch> sample_coupled_pair(
    const BodySpec& body, std::size_t count, RandomStream& rng,
    const SamplerOptions& options = {});

/// Burn-in and thinning of the hit-and-run chain: 10 n^2 and n^2 steps.
int hit_and_run_burn_in(int dim);
int hit_and_run_thinning(int dim);

/// CSV with a one-line JSON header prefixed by '#', then a column header
/// x1,...,xn, then one point per row printed with 17 significant digits.
void write_batch_csv(const SampleBatch& batch, std::ostream& out);
SampleBatch read_batch_csv(std::istream& in);

}  // namespace conehull
