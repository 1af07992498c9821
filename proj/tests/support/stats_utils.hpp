#pragma once

// Statistical helpers for tests: Kolmogorov-Smirnov tests, chi-square
// goodness of fit, and simple moment summaries. Independent of the library's
// implementation paths so they can serve as oracles.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace skm::testsupport {

inline double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double variance_of(const std::vector<double>& v) {
  const double mu = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mu) * (x - mu);
  return acc / static_cast<double>(v.size() - 1);
}

inline double correlation_of(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean_of(a), mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

/// One-sample KS statistic against a CDF callable.
template <typename Cdf>
double ks_statistic(std::vector<double> sample, Cdf cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

/// Critical KS value at level alpha (supported: 0.01, 0.05) with Stephens'
/// finite-sample correction.
inline double ks_critical(double alpha, std::size_t n) {
  double k_alpha;
  if (alpha == 0.01)
    k_alpha = 1.6276236115189503;  // sqrt(-ln(alpha/2)/2)
  else if (alpha == 0.05)
    k_alpha = 1.3581015157406195;
  else
    throw std::invalid_argument("ks_critical: unsupported alpha");
  const double rn = std::sqrt(static_cast<double>(n));
  return k_alpha / (rn + 0.12 + 0.11 / rn);
}

/// Two-sample KS statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

inline double ks_two_sample_critical(double alpha, std::size_t n1, std::size_t n2) {
  double k_alpha;
  if (alpha == 0.01)
    k_alpha = 1.6276236115189503;
  else if (alpha == 0.05)
    k_alpha = 1.3581015157406195;
  else
    throw std::invalid_argument("ks_two_sample_critical: unsupported alpha");
  return k_alpha * std::sqrt((static_cast<double>(n1) + n2) / (static_cast<double>(n1) * n2));
}

/// Chi-square upper quantile via the Wilson-Hilferty approximation
/// (adequate for df >= 3 at the levels used in tests).
inline double chi2_upper_quantile(double alpha, int df) {
  double z;
  if (alpha == 0.01)
    z = 2.3263478740408408;
  else if (alpha == 0.05)
    z = 1.6448536269514722;
  else
    throw std::invalid_argument("chi2_upper_quantile: unsupported alpha");
  const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
  return df * t * t * t;
}

}  // namespace skm::testsupport
