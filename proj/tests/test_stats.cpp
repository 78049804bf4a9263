#include <doctest.h>

#include <cmath>
#include <random>

#include "conehull/error.hpp"
#include "conehull/stats.hpp"

using namespace conehull;

TEST_CASE("type 7 quantiles") {
  const std::vector<double> v = {4, 1, 3, 2, 5};
  CHECK(quantile(v, 0.0) == 1);
  CHECK(quantile(v, 1.0) == 5);
  CHECK(median(v) == 3);
  CHECK(quantile(v, 0.25) == doctest::Approx(2.0));
  CHECK(quantile({1, 2}, 0.3) == doctest::Approx(1.3));
  CHECK_THROWS_AS(quantile({}, 0.5), Error);
  CHECK_THROWS_AS(quantile(v, 1.5), Error);
}

TEST_CASE("mean and standard error") {
  const std::vector<double> v = {1, 2, 3, 4};
  CHECK(mean(v) == doctest::Approx(2.5));
  CHECK(standard_error(v) == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("Theil-Sen recovers a line and ignores an outlier") {
  std::vector<double> x, y;
  for (int i = 0; i < 11; ++i) {
    x.push_back(i);
    y.push_back(2.0 * i - 1.0);
  }
  CHECK(theil_sen_slope(x, y) == doctest::Approx(2.0));
  y[10] = 1000;
  CHECK(theil_sen_slope(x, y) == doctest::Approx(2.0));
}

TEST_CASE("trend band of flat groups contains zero, of rising groups does not") {
  RandomStream rng(5, 5);
  std::normal_distribution<double> g;
  std::vector<double> x = {0.0, 1.0, 2.0};
  std::vector<std::vector<double>> flat(3), rising(3);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 200; ++i) {
      const double e = g(rng);
      flat[k].push_back(e);
      rising[k].push_back(e + 1.0 * k);
    }
  RandomStream r1(1, 1), r2(1, 1);
  const Band a = theil_sen_median_band(x, flat, 500, 0.95, r1);
  CHECK(a.low <= 0.0);
  CHECK(a.high >= 0.0);
  const Band b = theil_sen_quantile_band(x, rising, 0.5, 500, 0.95, r2);
  CHECK(b.low > 0.5);
  CHECK(b.estimate == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("bootstrap band is deterministic for a given stream") {
  const std::vector<double> v = {1, 5, 2, 8, 3, 9, 4};
  RandomStream a(2, 2), b(2, 2);
  const auto stat = [](const std::vector<double>& s) { return mean(s); };
  const Band x = bootstrap_band(v, stat, 300, 0.9, a);
  const Band y = bootstrap_band(v, stat, 300, 0.9, b);
  CHECK(x.low == y.low);
  CHECK(x.high == y.high);
  CHECK(x.low <= x.estimate);
  CHECK(x.estimate <= x.high);
}

TEST_CASE("two-sample KS") {
  RandomStream rng(9, 9);
  std::normal_distribution<double> g;
  std::vector<double> a(3000), b(3000), c(3000);
  for (auto& v : a) v = g(rng);
  for (auto& v : b) v = g(rng);
  for (auto& v : c) v = g(rng) + 0.3;
  CHECK(ks_two_sample(a, b).p_value > 1e-3);
  CHECK(ks_two_sample(a, c).p_value < 1e-6);
  CHECK(ks_two_sample({1, 2, 3}, {1, 2, 3}).statistic == 0.0);
}

TEST_CASE("chi-square against equal cells") {
  CHECK(chi_square_uniform({100, 100, 100, 100}).statistic == 0.0);
  CHECK(chi_square_uniform({100, 100, 100, 100}).p_value == doctest::Approx(1.0));
  // statistic 50 on 1 degree of freedom
  CHECK(chi_square_uniform({150, 50}).statistic == doctest::Approx(50.0));
  CHECK(chi_square_uniform({150, 50}).p_value < 1e-10);
}

TEST_CASE("binomial standard error") {
  CHECK(binomial_standard_error(0.5, 100) == doctest::Approx(0.05));
  CHECK(binomial_standard_error(0.0, 100) == 0.0);
}
