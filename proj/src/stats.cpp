#include "conehull/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>

#include "conehull/error.hpp"

namespace conehull {

double quantile(std::vector<double> values, double level) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "quantile of empty sample");
  if (!(level >= 0.0 && level <= 1.0)) throw Error(ErrorKind::InvalidArgument, "quantile level outside [0,1]");
  std::sort(values.begin(), values.end());
  const double h = level * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double mean(const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "mean of empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double standard_error(const std::vector<double>& values) {
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  const double k = static_cast<double>(values.size());
  return k > 1 ? std::sqrt(ss / (k - 1.0) / k) : 0.0;
}

double theil_sen_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "theil_sen_slope size mismatch");
  std::vector<double> slopes;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      if (x[j] != x[i]) slopes.push_back((y[j] - y[i]) / (x[j] - x[i]));
  if (slopes.empty()) throw Error(ErrorKind::InvalidArgument, "theil_sen_slope needs two distinct x");
  return median(std::move(slopes));
}

Band bootstrap_band(const std::vector<double>& values,
                    const std::function<double(const std::vector<double>&)>& statistic,
                    int resamples, double confidence, RandomStream& rng) {
  if (values.empty() || resamples < 1) throw Error(ErrorKind::InvalidArgument, "bad bootstrap arguments");
  Band band;
  band.estimate = statistic(values);
  std::vector<double> stats(static_cast<std::size_t>(resamples));
  std::vector<double> resample(values.size());
  for (auto& s : stats) {
    for (auto& r : resample) r = values[uniform_index(rng, values.size())];
    s = statistic(resample);
  }
  const double tail = 0.5 * (1.0 - confidence);
  band.low = quantile(stats, tail);
  band.high = quantile(stats, 1.0 - tail);
  return band;
}

Band theil_sen_quantile_band(const std::vector<double>& x,
                             const std::vector<std::vector<double>>& groups, double level,
                             int resamples, double confidence, RandomStream& rng) {
  if (x.size() != groups.size()) throw Error(ErrorKind::InvalidArgument, "group count mismatch");
  std::vector<double> stats;
  for (const auto& g : groups) stats.push_back(quantile(g, level));
  Band band;
  band.estimate = theil_sen_slope(x, stats);
  std::vector<double> slopes(static_cast<std::size_t>(resamples));
  std::vector<double> resample;
  for (auto& s : slopes) {
    for (std::size_t k = 0; k < groups.size(); ++k) {
      const auto& g = groups[k];
      resample.resize(g.size());
      for (auto& r : resample) r = g[uniform_index(rng, g.size())];
      stats[k] = quantile(resample, level);
    }
    s = theil_sen_slope(x, stats);
  }
  const double tail = 0.5 * (1.0 - confidence);
  band.low = quantile(slopes, tail);
  band.high = quantile(slopes, 1.0 - tail);
  return band;
}

Band theil_sen_median_band(const std::vector<double>& x,
                           const std::vector<std::vector<double>>& groups, int resamples,
                           double confidence, RandomStream& rng) {
  return theil_sen_quantile_band(x, groups, 0.5, resamples, confidence, rng);
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::InvalidArgument, "empty KS sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  // Kolmogorov distribution tail 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    p += term;
    if (std::abs(term) < 1e-12) break;
  }
  return {d, std::clamp(p, 0.0, 1.0)};
}

TestResult chi_square_uniform(const std::vector<std::size_t>& counts) {
  if (counts.size() < 2) throw Error(ErrorKind::InvalidArgument, "chi-square needs two cells");
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  const double expected = total / static_cast<double>(counts.size());
  double x2 = 0.0;
  for (auto c : counts) x2 += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  return {x2, boost::math::cdf(boost::math::complement(dist, x2))};
}

double binomial_standard_error(double p, std::size_t trials) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

}  // namespace conehull
