#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "conehull/rng.hpp"

namespace conehull {

/// Sample quantile with linear interpolation between order statistics
/// (the usual "type 7" definition). `level` in [0, 1].
double quantile(std::vector<double> values, double level);
double median(std::vector<double> values);
double mean(const std::vector<double>& values);
/// Standard error of the mean.
double standard_error(const std::vector<double>& values);

/// Median of pairwise slopes (y_j - y_i) / (x_j - x_i), x_i != x_j.
double theil_sen_slope(const std::vector<double>& x, const std::vector<double>& y);

struct Band {
  double estimate = 0.0;
  double low = 0.0;
  double high = 0.0;
};

/// Percentile bootstrap band of `statistic` over `resamples` resamples drawn
/// with replacement from `values`. `confidence` is the two-sided level.
Band bootstrap_band(const std::vector<double>& values,
                    const std::function<double(const std::vector<double>&)>& statistic,
                    int resamples, double confidence, RandomStream& rng);

/// Theil-Sen slope of per-group medians against x, with a percentile
/// bootstrap band from resampling within each group.
Band theil_sen_median_band(const std::vector<double>& x,
                           const std::vector<std::vector<double>>& groups, int resamples,
                           double confidence, RandomStream& rng);
/// Same with the per-group quantile at `level` in place of the median.
Band theil_sen_quantile_band(const std::vector<double>& x,
                             const std::vector<std::vector<double>>& groups, double level,
                             int resamples, double confidence, RandomStream& rng);

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Pearson chi-square test of observed counts against equal cell probabilities.
TestResult chi_square_uniform(const std::vector<std::size_t>& counts);

/// Standard error of a binomial frequency estimate p from `trials` draws.
double binomial_standard_error(double p, std::size_t trials);

}  // namespace conehull
