#include "conehull/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <variant>

#include "conehull/error.hpp"
#include "conehull/gauge.hpp"
#include "conehull/hull.hpp"
#include "conehull/overloaded.hpp"
#include "conehull/parallel.hpp"
#include "conehull/sampling.hpp"
#include "conehull/stats.hpp"

namespace conehull {

namespace {

constexpr std::uint64_t kTheoremTag = 0x7468656f72656dULL;
constexpr std::uint64_t kVolumeTag = 0x766f6c756d65ULL;
constexpr std::uint64_t kTrendTag = 0x7472656e64ULL;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string csv_safe(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  return s;
}

const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Unconditional: return "unconditional";
    case ExperimentKind::General: return "general";
    case ExperimentKind::VolumeRadius: return "volume_radius";
  }
  return "?";
}

const char* mode_name(PathMode m) {
  switch (m) {
    case PathMode::Auto: return "auto";
    case PathMode::Exact: return "exact";
    case PathMode::MonteCarlo: return "mc";
  }
  return "?";
}

bool exact_path(PathMode mode, int n) {
  if (mode == PathMode::MonteCarlo) return false;
  return n <= kMaxExactHullDim;
}

// Cone points of a polytope land on its facets, so K_N may have coplanar
// adjacent facets; those bodies get a triangulating hull.
bool polytopal(const BodySpec& body) {
  return std::visit(Overloaded{
                        [](const LpBall& b) { return b.p.is_infinite() || b.p.value() == 1.0; },
                        [](const ScaledL1&) { return true; },
                        [](const SymmetricHPolytope&) { return true; },
                        [](const LinearImage& b) { return polytopal(*b.inner); },
                    },
                    body.kind());
}

nlohmann::json with_dim(nlohmann::json entry, int n) {
  entry.erase("label");
  if (entry.value("kind", "") == "linear_image" && entry.contains("inner")) {
    entry["inner"] = with_dim(entry["inner"], n);
  } else {
    entry["dim"] = n;
  }
  return entry;
}

// One body of the family instantiated in one dimension.
struct BodyCell {
  std::string label;
  std::uint64_t hash = 0;
  int n = 0;
  BodySpec body;
  bool polytopal = false;
  std::vector<std::size_t> schedule;
};

std::vector<BodyCell> instantiate(const ExperimentConfig& config, bool require_unconditional) {
  std::vector<BodyCell> cells;
  for (const auto& entry : config.bodies) {
    for (int n : config.dims) {
      BodySpec body = [&] {
        try {
          return isotropic_normalize(body_from_json(with_dim(entry, n)));
        } catch (const Error& e) {
          config_error("body " + body_label(entry) + " in dimension " + std::to_string(n) + ": " + e.what());
        } catch (const nlohmann::json::exception& e) {
          config_error("body " + entry.dump() + ": " + e.what());
        }
      }();
      if (require_unconditional && !is_unconditional(body))
        config_error("body " + body_label(entry) + " is not unconditional");
      cells.push_back(BodyCell{body_label(entry), fnv1a(entry.dump()), n, body, polytopal(body),
                               resolve_schedule(config.n_schedule, n)});
    }
  }
  return cells;
}

double log_ratio(std::size_t N, int n) { return std::log(2.0 * static_cast<double>(N) / n); }

// ---------------------------------------------------------------------------

TrialRow theorem_trial(const ExperimentConfig& config, const BodyCell& cell, std::size_t N, int trial) {
  TrialRow row;
  row.trial = trial;
  row.n = cell.n;
  row.N = N;
  row.body = cell.label;
  row.seed = config.master_seed;
  row.stream = mix_stream_id(mix_stream_id(cell.hash, static_cast<std::uint64_t>(cell.n), N),
                             static_cast<std::uint64_t>(trial), kTheoremTag);
  row.exact = exact_path(config.mode, cell.n);
  RandomStream rng(row.seed, row.stream);
  try {
    const SampleBatch batch = sample_cone_boundary(cell.body, N, rng);
    if (row.exact) {
      HullOptions hull_options;
      hull_options.allow_non_simplicial = cell.polytopal;
      const SymmetricPolytope polytope = build_hull(batch, hull_options);
      BoundChainOptions options;
      options.l1_mode = config.l1_mode;
      options.l1_samples = config.l1_samples;
      row.chain = bound_chain(polytope, &rng, options);
      row.vertices = polytope.vertex_count();
      row.volume = polytope.volume;
      if (trial < config.cross_validate_trials) {
        const RadialEstimate radial = radial_moments(batch.points, config.radial_directions, rng);
        row.mc_volume = radial.volume;
        row.mc_volume_se = radial.volume_se;
      }
    } else {
      const RadialEstimate radial = radial_moments(batch.points, config.radial_directions, rng);
      row.chain = bound_chain(cell.n, radial);
      row.volume = radial.volume;
      row.mc_volume = radial.volume;
      row.mc_volume_se = radial.volume_se;
    }
    if (config.subset_max) {
      const SubsetMax l1 = max_subset_sign_sum(batch.points, SubsetNorm::L1, config.subset_budget, rng,
                                               SubsetMode::Auto, config.subset_cap);
      const SubsetMax l2 = max_subset_sign_sum(batch.points, SubsetNorm::L2, config.subset_budget, rng,
                                               SubsetMode::Auto, config.subset_cap);
      row.subset_l1 = l1.value;
      row.subset_l2 = l2.value;
      row.subset_exhaustive = l1.exhaustive && l2.exhaustive;
    }
    const double lr = log_ratio(N, cell.n);
    row.l_normalized = row.chain.l_exact / std::sqrt(lr);
    row.vol_radius_normalized = row.chain.volume_radius / std::min(std::sqrt(lr / cell.n), 1.0);
    row.consistent = row.chain.l_exact <= row.chain.l2_bound * (1.0 + 1e-12);
  } catch (const Error& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

nlohmann::json quantile_summary(const std::vector<double>& v) {
  if (v.empty()) return nullptr;
  return {{"median", median(v)}, {"q01", quantile(v, 0.01)}, {"q99", quantile(v, 0.99)},
          {"min", *std::min_element(v.begin(), v.end())}, {"max", *std::max_element(v.begin(), v.end())}};
}

ExperimentReport run_theorem(const ExperimentConfig& config, ExperimentKind kind) {
  const bool unconditional = kind == ExperimentKind::Unconditional;
  const auto cells = instantiate(config, unconditional);

  ExperimentReport report;
  report.kind = kind;
  if (!unconditional) {
    for (const auto& c : cells)
      for (std::size_t N : c.schedule)
        if (static_cast<double>(N) > std::exp(std::sqrt(static_cast<double>(c.n))))
          report.warnings.push_back(c.label + " n=" + std::to_string(c.n) + " N=" + std::to_string(N) +
                                    ": N exceeds exp(sqrt n), outside the proven regime");
  }

  struct Task {
    std::size_t cell;
    std::size_t N;
    int trial;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (std::size_t N : cells[c].schedule)
      for (int t = 0; t < config.trials; ++t) tasks.push_back({c, N, t});
  report.rows.resize(tasks.size());
  parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
    report.rows[i] = theorem_trial(config, cells[tasks[i].cell], tasks[i].N, tasks[i].trial);
  });

  // Assembly in (body, n, N, trial) order, single-threaded.
  nlohmann::json cell_docs = nlohmann::json::array();
  nlohmann::json trend_docs = nlohmann::json::array();
  double max_l = -1.0;
  nlohmann::json max_l_at;
  bool pass = true;
  std::size_t offset = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& cell = cells[c];
    std::vector<double> xs;
    std::vector<std::vector<double>> groups;
    std::vector<double> medians_normalized;
    for (std::size_t N : cell.schedule) {
      std::vector<double> l, ln, vr, c_ratio;
      int failures = 0, inconsistent = 0, vertex_violations = 0;
      std::vector<std::string> errors;
      for (int t = 0; t < config.trials; ++t) {
        const TrialRow& r = report.rows[offset++];
        if (!r.ok) {
          ++failures;
          if (errors.size() < 5) errors.push_back(r.error);
          continue;
        }
        l.push_back(r.chain.l_exact);
        ln.push_back(r.l_normalized);
        vr.push_back(r.chain.volume_radius);
        c_ratio.push_back(r.chain.l_exact / r.chain.l1_bound_raw);
        if (!r.consistent) ++inconsistent;
        if (r.exact && N <= static_cast<std::size_t>(2 * cell.n) && r.vertices != static_cast<int>(2 * N))
          ++vertex_violations;
        if (r.chain.l_exact > max_l) {
          max_l = r.chain.l_exact;
          max_l_at = {{"body", cell.label}, {"n", cell.n}, {"N", N}, {"trial", t}};
        }
      }
      const double failure_rate = static_cast<double>(failures) / config.trials;
      const bool cell_pass = failure_rate <= 0.01 && inconsistent == 0 && !l.empty();
      pass = pass && cell_pass;
      nlohmann::json doc = {{"body", cell.label},
                            {"n", cell.n},
                            {"N", N},
                            {"trials", config.trials},
                            {"failures", failures},
                            {"failure_rate", failure_rate},
                            {"errors", errors},
                            {"consistency_violations", inconsistent},
                            {"l", quantile_summary(l)},
                            {"l_normalized", quantile_summary(ln)},
                            {"vol_radius", quantile_summary(vr)},
                            {"l_over_l1_bound_raw", quantile_summary(c_ratio)},
                            {"pass", cell_pass}};
      if (N <= static_cast<std::size_t>(2 * cell.n) && exact_path(config.mode, cell.n))
        doc["vertex_count_violations"] = vertex_violations;
      cell_docs.push_back(doc);
      if (!l.empty()) {
        xs.push_back(std::log(std::log(static_cast<double>(N))));
        groups.push_back(unconditional ? l : ln);
        medians_normalized.push_back(median(ln));
      }
    }
    if (groups.size() >= 2) {
      RandomStream rng(config.master_seed, mix_stream_id(cell.hash, static_cast<std::uint64_t>(cell.n), kTrendTag));
      const Band med = theil_sen_quantile_band(xs, groups, 0.5, config.bootstrap_resamples, 0.95, rng);
      const Band q99 = theil_sen_quantile_band(xs, groups, 0.99, config.bootstrap_resamples, 0.95, rng);
      const bool trend_pass = med.low <= 0.0 && q99.low <= 0.0;
      pass = pass && trend_pass;
      const auto [lo, hi] = std::minmax_element(medians_normalized.begin(), medians_normalized.end());
      double growth = 0.0;  // largest rise of the normalized median from a smaller N to a larger one
      for (std::size_t i = 0; i < medians_normalized.size(); ++i)
        for (std::size_t j = i + 1; j < medians_normalized.size(); ++j)
          growth = std::max(growth, medians_normalized[j] / medians_normalized[i] - 1.0);
      trend_docs.push_back({{"body", cell.label},
                            {"n", cell.n},
                            {"statistic", unconditional ? "l" : "l_normalized"},
                            {"x", "log log N"},
                            {"median_slope", {{"estimate", med.estimate}, {"low", med.low}, {"high", med.high}}},
                            {"q99_slope", {{"estimate", q99.estimate}, {"low", q99.low}, {"high", q99.high}}},
                            {"median_band_pass", med.low <= 0.0},
                            {"q99_band_pass", q99.low <= 0.0},
                            {"normalized_median_spread", *hi / *lo - 1.0},
                            {"normalized_median_growth", growth},
                            {"normalized_growth_within_20pct", growth <= 0.2},
                            {"pass", trend_pass}});
    }
  }
  report.pass = pass;
  report.summary = {{"experiment", kind_name(kind)},
                    {"config", config.to_json()},
                    {"cells", cell_docs},
                    {"trends", trend_docs},
                    {"max_l", max_l},
                    {"max_l_at", max_l_at},
                    {"warnings", report.warnings},
                    {"pass", pass}};
  return report;
}

// ---------------------------------------------------------------------------

struct VolumeTrial {
  std::vector<VolumeRadiusRow> rows;  // one per N of the schedule
};

VolumeTrial volume_trial(const ExperimentConfig& config, const BodyCell& cell, double lk, int trial) {
  VolumeTrial out;
  const std::uint64_t stream =
      mix_stream_id(mix_stream_id(cell.hash, static_cast<std::uint64_t>(cell.n), kVolumeTag),
                    static_cast<std::uint64_t>(trial));
  RandomStream rng(config.master_seed, stream);
  const bool exact = exact_path(config.mode, cell.n);
  const std::size_t n_max = cell.schedule.back();
  std::optional<std::pair<SampleBatch, SampleBatch>> pair;
  std::string draw_error;
  try {
    pair = sample_coupled_pair(cell.body, n_max, rng);
  } catch (const Error& e) {
    draw_error = e.what();
  }
  double previous = 0.0;
  for (std::size_t N : cell.schedule) {
    VolumeRadiusRow row;
    row.trial = trial;
    row.n = cell.n;
    row.N = N;
    row.body = cell.label;
    row.seed = config.master_seed;
    row.stream = stream;
    if (!pair) {
      row.ok = false;
      row.error = draw_error;
      out.rows.push_back(row);
      continue;
    }
    row.zero_redraws = pair->first.zero_redraws + pair->second.zero_redraws;
    const Matrix Y = pair->first.points.leftCols(static_cast<Eigen::Index>(N));
    const Matrix X = pair->second.points.leftCols(static_cast<Eigen::Index>(N));
    try {
      double vol_x = 0.0, vol_y = 0.0;
      if (exact) {
        HullOptions cone_options;
        cone_options.allow_non_simplicial = cell.polytopal;
        const SymmetricPolytope px = build_hull(X, cone_options);
        const SymmetricPolytope py = build_hull(Y);
        for (Eigen::Index i = 0; i < Y.cols(); ++i)
          if (px.gauge(Y.col(i)) > 1.0 + 1e-9) row.inclusion = false;
        vol_x = px.volume;
        vol_y = py.volume;
      } else {
        for (Eigen::Index i = 0; i < Y.cols(); ++i)
          if (!in_symmetric_hull(X, Y.col(i))) row.inclusion = false;
        // Common directions: the radial function of conv{+-Y} is pointwise
        // below that of K_N, so the estimates keep the ordering.
        RandomStream dirs(config.master_seed, mix_stream_id(stream, N, kVolumeTag));
        RandomStream dirs_copy = dirs;
        vol_x = radial_moments(X, config.radial_directions, dirs).volume;
        vol_y = radial_moments(Y, config.radial_directions, dirs_copy).volume;
      }
      row.coupling = vol_y <= vol_x * (1.0 + 1e-12);
      row.vol_radius = std::pow(vol_x, 1.0 / cell.n);
      row.vol_radius_uniform = std::pow(vol_y, 1.0 / cell.n);
      const double lr = log_ratio(N, cell.n);
      row.ratio_a = row.vol_radius / std::min(std::sqrt(lr / cell.n), 1.0);
      row.ratio_b = row.vol_radius / (lk * std::sqrt(lr / cell.n));
      row.nested = row.vol_radius >= previous * (1.0 - 1e-12);
      previous = row.vol_radius;
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::size_t> resolve_schedule(const std::vector<std::string>& terms, int n) {
  if (terms.empty()) config_error("empty N schedule");
  std::set<std::size_t> values;
  for (const auto& raw : terms) {
    std::string t;
    for (char c : raw)
      if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    long long v = 0;
    std::size_t digits = 0;
    while (digits < t.size() && std::isdigit(static_cast<unsigned char>(t[digits]))) ++digits;
    const long long coefficient = digits ? std::stoll(t.substr(0, digits)) : 1;
    const std::string rest = t.substr(digits);
    if (rest.empty() && digits) {
      v = coefficient;
    } else if (rest == "n" || rest == "*n") {
      v = coefficient * n;
    } else if (rest == "n^2" || rest == "*n^2") {
      v = coefficient * n * n;
    } else if (rest == "nlogn" || rest == "*nlogn") {
      v = std::llround(coefficient * n * std::log(static_cast<double>(n)));
    } else {
      config_error("unknown N schedule term '" + raw + "'");
    }
    if (v <= n) config_error("N schedule term '" + raw + "' gives N=" + std::to_string(v) + " <= n=" + std::to_string(n));
    values.insert(static_cast<std::size_t>(v));
  }
  return {values.begin(), values.end()};
}

std::string body_label(const nlohmann::json& entry) {
  if (entry.contains("label")) return csv_safe(entry["label"].get<std::string>());
  const std::string kind = entry.value("kind", "body");
  if (kind == "lp_ball" && entry.contains("p")) {
    const auto& p = entry["p"];
    return p.is_string() ? "cube" : "lp_ball_p" + short_num(p.get<double>());
  }
  if (kind == "rotated_cube") return "rotated_cube_s" + std::to_string(entry.value("rotation_seed", std::uint64_t{1}));
  if (kind == "scaled_l1" && entry.contains("c")) return "scaled_l1_c" + short_num(entry["c"].get<double>());
  return kind;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc) {
  static const std::set<std::string> known = {
      "experiment", "bodies", "dims", "n_schedule", "trials", "master_seed", "mode", "subset_max",
      "subset_budget", "subset_cap", "l1_mode", "l1_samples", "radial_directions", "cross_validate_trials",
      "bootstrap_resamples", "workers", "output"};
  ExperimentConfig c;
  try {
    if (!doc.is_object()) config_error("config must be a JSON object");
    for (const auto& [key, value] : doc.items())
      if (!known.count(key)) config_error("unknown config key '" + key + "'");
    const std::string kind = doc.value("experiment", "unconditional");
    if (kind == "unconditional") c.kind = ExperimentKind::Unconditional;
    else if (kind == "general") c.kind = ExperimentKind::General;
    else if (kind == "volume_radius") c.kind = ExperimentKind::VolumeRadius;
    else config_error("unknown experiment '" + kind + "'");
    for (const auto& b : doc.at("bodies")) {
      if (!b.is_object()) config_error("body entries must be objects");
      if (b.contains("dim")) config_error("body entries take their dimension from dims");
      c.bodies.push_back(b);
    }
    c.dims = doc.at("dims").get<std::vector<int>>();
    for (const auto& term : doc.at("n_schedule"))
      c.n_schedule.push_back(term.is_string() ? term.get<std::string>() : std::to_string(term.get<long long>()));
    c.trials = doc.value("trials", c.trials);
    c.master_seed = doc.value("master_seed", c.master_seed);
    const std::string mode = doc.value("mode", "auto");
    if (mode == "auto") c.mode = PathMode::Auto;
    else if (mode == "exact") c.mode = PathMode::Exact;
    else if (mode == "mc") c.mode = PathMode::MonteCarlo;
    else config_error("unknown mode '" + mode + "'");
    c.subset_max = doc.value("subset_max", c.subset_max);
    c.subset_budget = doc.value("subset_budget", c.subset_budget);
    c.subset_cap = doc.value("subset_cap", c.subset_cap);
    const std::string l1 = doc.value("l1_mode", "auto");
    if (l1 == "auto") c.l1_mode = L1Mode::Auto;
    else if (l1 == "exact") c.l1_mode = L1Mode::Exact;
    else if (l1 == "mc") c.l1_mode = L1Mode::MonteCarlo;
    else config_error("unknown l1_mode '" + l1 + "'");
    c.l1_samples = doc.value("l1_samples", c.l1_samples);
    c.radial_directions = doc.value("radial_directions", c.radial_directions);
    c.cross_validate_trials = doc.value("cross_validate_trials", c.cross_validate_trials);
    c.bootstrap_resamples = doc.value("bootstrap_resamples", c.bootstrap_resamples);
    c.workers = doc.value("workers", c.workers);
    if (doc.contains("output")) {
      c.csv_path = doc["output"].value("csv", "");
      c.json_path = doc["output"].value("json", "");
    }
  } catch (const nlohmann::json::exception& e) {
    config_error(e.what());
  }
  if (c.bodies.empty()) config_error("no bodies");
  if (c.dims.empty()) config_error("no dims");
  if (c.trials < 1) config_error("trials must be positive");
  if (c.bootstrap_resamples < 1) config_error("bootstrap_resamples must be positive");
  if (c.radial_directions < 2) config_error("radial_directions must be at least 2");
  if (c.l1_samples < 2) config_error("l1_samples must be at least 2");
  if (c.subset_budget < 1) config_error("subset_budget must be positive");
  std::set<std::string> labels;
  for (const auto& b : c.bodies)
    if (!labels.insert(body_label(b)).second) config_error("duplicate body label '" + body_label(b) + "'");
  for (int n : c.dims) {
    if (n < 1) config_error("dimensions must be positive");
    if (c.mode == PathMode::Exact && n > kMaxExactHullDim)
      config_error("exact mode supports n <= " + std::to_string(kMaxExactHullDim));
    resolve_schedule(c.n_schedule, n);
  }
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"experiment", kind_name(kind)},
          {"bodies", bodies},
          {"dims", dims},
          {"n_schedule", n_schedule},
          {"trials", trials},
          {"master_seed", master_seed},
          {"mode", mode_name(mode)},
          {"subset_max", subset_max},
          {"subset_budget", subset_budget},
          {"subset_cap", subset_cap},
          {"l1_mode", l1_mode == L1Mode::Auto ? "auto" : l1_mode == L1Mode::Exact ? "exact" : "mc"},
          {"l1_samples", l1_samples},
          {"radial_directions", radial_directions},
          {"cross_validate_trials", cross_validate_trials},
          {"bootstrap_resamples", bootstrap_resamples},
          {"output", {{"csv", csv_path}, {"json", json_path}}}};
}

void ExperimentReport::write_csv(std::ostream& out) const {
  out << "trial,n,N,body,l_exact,l1_bound_raw,l2_bound,facet_l1,facet_l2sq,vol_radius,seed,"
         "stream,status,path,vertices,volume,mc_volume,mc_volume_se,l1_bound_raw_se,l1_exact,"
         "subset_l1,subset_l2,subset_exhaustive,l_normalized,vol_radius_normalized,consistent,error\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : rows) {
    const BoundChain& b = r.chain;
    const bool ok = r.ok;
    out << r.trial << ',' << r.n << ',' << r.N << ',' << r.body << ',' << num(ok ? b.l_exact : nan) << ','
        << num(ok ? b.l1_bound_raw : nan) << ',' << num(ok ? b.l2_bound : nan) << ','
        << num(ok ? b.facet_l1 : nan) << ',' << num(ok ? b.facet_l2sq : nan) << ','
        << num(ok ? b.volume_radius : nan) << ',' << r.seed << ',' << r.stream << ','
        << (ok ? "ok" : "failed") << ',' << (r.exact ? "exact" : "mc") << ',' << r.vertices << ','
        << num(ok ? r.volume : nan) << ',' << num(r.mc_volume) << ',' << num(r.mc_volume_se) << ','
        << num(ok ? b.l1_bound_raw_se : nan) << ',' << (b.l1_exact ? 1 : 0) << ',' << num(r.subset_l1) << ','
        << num(r.subset_l2) << ',' << (r.subset_exhaustive ? 1 : 0) << ',' << num(ok ? r.l_normalized : nan)
        << ',' << num(ok ? r.vol_radius_normalized : nan) << ',' << (r.consistent ? 1 : 0) << ','
        << csv_safe(r.error) << '\n';
  }
}

ExperimentReport run_unconditional_experiment(const ExperimentConfig& config) {
  return run_theorem(config, ExperimentKind::Unconditional);
}

ExperimentReport run_general_experiment(const ExperimentConfig& config) {
  return run_theorem(config, ExperimentKind::General);
}

void VolumeRadiusReport::write_csv(std::ostream& out) const {
  out << "trial,n,N,body,vol_radius,vol_radius_uniform,inclusion,coupling,nested,ratio_a,ratio_b,"
         "seed,stream,status,zero_redraws,error\n";
  for (const auto& r : rows) {
    out << r.trial << ',' << r.n << ',' << r.N << ',' << r.body << ',' << num(r.vol_radius) << ','
        << num(r.vol_radius_uniform) << ',' << (r.inclusion ? 1 : 0) << ',' << (r.coupling ? 1 : 0) << ','
        << (r.nested ? 1 : 0) << ',' << num(r.ratio_a) << ',' << num(r.ratio_b) << ',' << r.seed << ','
        << r.stream << ',' << (r.ok ? "ok" : "failed") << ',' << r.zero_redraws << ',' << csv_safe(r.error)
        << '\n';
  }
}

VolumeRadiusReport run_volume_radius_check(const ExperimentConfig& config) {
  const auto cells = instantiate(config, false);
  std::vector<double> lk(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) lk[c] = body_isotropic_constant(cells[c].body);

  const auto trials = static_cast<std::size_t>(config.trials);
  std::vector<VolumeTrial> results(cells.size() * trials);
  parallel_for(results.size(), config.workers, [&](std::size_t i) {
    const std::size_t c = i / trials;
    results[i] = volume_trial(config, cells[c], lk[c], static_cast<int>(i % trials));
  });

  VolumeRadiusReport report;
  nlohmann::json cell_docs = nlohmann::json::array();
  bool pass = true;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& cell = cells[c];
    std::vector<double> medians;
    for (std::size_t k = 0; k < cell.schedule.size(); ++k) {
      std::vector<double> vr, ra, rb;
      int failures = 0, inclusion = 0, coupling = 0, nested = 0, ok = 0;
      for (std::size_t t = 0; t < trials; ++t) {
        const VolumeRadiusRow& r = results[c * trials + t].rows[k];
        report.rows.push_back(r);
        if (!r.ok) {
          ++failures;
          continue;
        }
        ++ok;
        inclusion += r.inclusion;
        coupling += r.coupling;
        nested += r.nested;
        vr.push_back(r.vol_radius);
        ra.push_back(r.ratio_a);
        rb.push_back(r.ratio_b);
      }
      const double failure_rate = static_cast<double>(failures) / config.trials;
      const double q01 = ra.empty() ? 0.0 : quantile(ra, 0.01);
      const bool cell_pass = failure_rate <= 0.01 && inclusion == ok && coupling == ok && nested == ok && q01 > 0.0;
      pass = pass && cell_pass;
      if (!vr.empty()) medians.push_back(median(vr));
      cell_docs.push_back({{"body", cell.label},
                           {"n", cell.n},
                           {"N", cell.schedule[k]},
                           {"trials", config.trials},
                           {"failures", failures},
                           {"inclusion_holds", inclusion},
                           {"coupling_holds", coupling},
                           {"nested_holds", nested},
                           {"vol_radius", quantile_summary(vr)},
                           {"ratio_a", quantile_summary(ra)},
                           {"ratio_b", quantile_summary(rb)},
                           {"isotropic_constant", lk[c]},
                           {"pass", cell_pass}});
    }
    const bool monotone = std::is_sorted(medians.begin(), medians.end());
    pass = pass && monotone;
    cell_docs.push_back({{"body", cell.label}, {"n", cell.n}, {"median_vol_radius_nondecreasing", monotone}});
  }
  report.pass = pass;
  report.summary = {{"experiment", "volume_radius"}, {"config", config.to_json()}, {"cells", cell_docs}, {"pass", pass}};
  return report;
}

int run_configured(const ExperimentConfig& config, std::ostream& log) {
  auto write = [&](const std::string& path, auto&& emit) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::binary);
    if (!out) config_error("cannot open output " + path);
    emit(out);
  };
  bool pass = false;
  if (config.kind == ExperimentKind::VolumeRadius) {
    const VolumeRadiusReport report = run_volume_radius_check(config);
    write(config.csv_path, [&](std::ostream& o) { report.write_csv(o); });
    write(config.json_path, [&](std::ostream& o) { o << report.summary.dump(2) << '\n'; });
    pass = report.pass;
  } else {
    const ExperimentReport report = config.kind == ExperimentKind::Unconditional
                                        ? run_unconditional_experiment(config)
                                        : run_general_experiment(config);
    for (const auto& w : report.warnings) log << "warning: " << w << '\n';
    write(config.csv_path, [&](std::ostream& o) { report.write_csv(o); });
    write(config.json_path, [&](std::ostream& o) { o << report.summary.dump(2) << '\n'; });
    pass = report.pass;
  }
  log << kind_name(config.kind) << ": " << (pass ? "pass" : "fail") << '\n';
  return pass ? 0 : 1;
}

}  // namespace conehull
