#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace sggraph {

// Binomial standard deviation of an empirical frequency at n trials.
inline double binomial_sigma(double p, std::size_t n) {
  const double q = std::clamp(p, 0.0, 1.0);
  return std::sqrt(q * (1.0 - q) / static_cast<double>(n));
}

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

// Pearson chi-square fit of observed counts against expected Poisson(mean)
// counts, pooling the tail so every expected cell has at least min_expected.
inline ChiSquareResult chi_square_poisson_fit(const std::vector<std::size_t>& histogram,
                                              double mean, std::size_t n_samples,
                                              double min_expected = 5.0) {
  // Expected cell masses for counts 0,1,2,... plus the remaining tail.
  std::vector<double> expected;
  double cum = 0.0;
  double pk = std::exp(-mean);  // P(N = 0)
  for (std::size_t k = 0; k < histogram.size(); ++k) {
    expected.push_back(pk * static_cast<double>(n_samples));
    cum += pk;
    pk *= mean / static_cast<double>(k + 1);
  }
  expected.push_back(std::max(0.0, 1.0 - cum) * static_cast<double>(n_samples));

  std::vector<double> obs(histogram.begin(), histogram.end());
  obs.push_back(0.0);  // histogram is exhaustive; tail cell observed zero

  // Pool trailing cells until the last expected cell is big enough.
  while (expected.size() > 2 && expected.back() < min_expected) {
    expected[expected.size() - 2] += expected.back();
    expected.pop_back();
    obs[obs.size() - 2] += obs.back();
    obs.pop_back();
  }

  ChiSquareResult r;
  for (std::size_t k = 0; k < expected.size(); ++k) {
    if (expected[k] <= 0) continue;
    const double d = obs[k] - expected[k];
    r.statistic += d * d / expected[k];
    ++r.dof;
  }
  if (r.dof <= 1) throw std::invalid_argument("chi_square_poisson_fit: too few cells");
  r.dof -= 1;
  boost::math::chi_squared dist(static_cast<double>(r.dof));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

// Kolmogorov distribution tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 lambda^2}.
inline double kolmogorov_tail(double lambda) {
  if (lambda < 0.1) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    s += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// One-sample KS test of data against the standard normal, with Stephens'
// finite-sample correction for the p-value.
inline KsResult ks_test_standard_normal(std::vector<double> data) {
  if (data.size() < 5) throw std::invalid_argument("ks_test: too few samples");
  std::sort(data.begin(), data.end());
  boost::math::normal norm;
  const double n = static_cast<double>(data.size());
  double d = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double cdf = boost::math::cdf(norm, data[i]);
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
  }
  KsResult r;
  r.statistic = d;
  const double sn = std::sqrt(n);
  r.p_value = kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

inline double sample_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Standardized third and fourth central moments.
inline double sample_skewness(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s2 = 0.0, s3 = 0.0;
  for (double x : v) {
    const double d = x - m;
    s2 += d * d;
    s3 += d * d * d;
  }
  const double n = static_cast<double>(v.size());
  s2 /= n;
  s3 /= n;
  return s3 / std::pow(s2, 1.5);
}

inline double sample_excess_kurtosis(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s2 = 0.0, s4 = 0.0;
  for (double x : v) {
    const double d = x - m;
    s2 += d * d;
    s4 += d * d * d * d;
  }
  const double n = static_cast<double>(v.size());
  s2 /= n;
  s4 /= n;
  return s4 / (s2 * s2) - 3.0;
}

}  // namespace sggraph
