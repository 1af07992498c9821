#include "skm/math_utils.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace skm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double norm_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

double gauss_to_uniform(double z) {
  if (!std::isfinite(z)) throw std::invalid_argument("gauss_to_uniform: non-finite input");
  const double eps = 1e-16;
  return std::clamp(norm_cdf(z), eps, 1.0 - eps);
}

// AS241 (Wichura 1988), PPND16.
double norm_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    throw std::invalid_argument("norm_quantile: p outside [0,1]");
  }
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) *
                    r +
                4.5921953931549871457e+4) *
                   r +
               1.3731693765509461125e+4) *
                  r +
              1.9715909503065514427e+3) *
                 r +
             1.3314166789178437745e+2) *
                r +
            3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) *
                    r +
                2.1213794301586595867e+4) *
                   r +
               5.3941960214247511077e+3) *
                  r +
              6.8718700749205790830e+2) *
                 r +
             4.2313330701600911252e+1) *
                r +
            1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) *
                   r +
               1.27045825245236838258e0) *
                  r +
              3.64784832476320460504e0) *
                 r +
             5.76949722146069140550e0) *
                r +
            4.63033784615654529590e0) *
               r +
           1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) *
                   r +
               1.48103976427480074590e-1) *
                  r +
              6.89767334985100004550e-1) *
                 r +
             1.67638483018380384940e0) *
                r +
            2.05319162663775882187e0) *
               r +
           1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) *
                   r +
               2.65321895265761230930e-2) *
                  r +
              2.96560571828504891230e-1) *
                 r +
             1.78482653991729133580e0) *
                r +
            5.46378491116411436990e0) *
               r +
           6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) *
                   r +
               7.86869131145613259100e-4) *
                  r +
              1.48753612908506148525e-2) *
                 r +
             1.36929880922735805310e-1) *
                r +
            5.99832206555887937690e-1) *
               r +
           1.0);
  }
  return (q < 0.0) ? -val : val;
}

double log_poisson_pmf(long long k, double mu) {
  if (k < 0) return -kInf;
  if (!(mu >= 0.0)) throw std::invalid_argument("log_poisson_pmf: negative mean");
  if (mu == 0.0) return (k == 0) ? 0.0 : -kInf;
  return static_cast<double>(k) * std::log(mu) - mu - std::lgamma(static_cast<double>(k) + 1.0);
}

namespace {

// Inversion via the pmf recurrence from k = 0; valid while exp(-lambda)
// stays normal.
long long poisson_quantile_small(double lambda, double p) {
  double term = std::exp(-lambda);
  double cum = term;
  double comp = 0.0;  // Kahan compensation
  long long k = 0;
  const long long cap = static_cast<long long>(lambda + 12.0 * std::sqrt(lambda) + 60.0);
  while (cum < p && k < cap) {
    ++k;
    term *= lambda / static_cast<double>(k);
    const double yv = term - comp;
    const double tv = cum + yv;
    comp = (tv - cum) - yv;
    cum = tv;
  }
  return k;
}

// Mode-anchored inversion: pmfs are scaled by 1/pmf(mode) so the recurrence
// never underflows, and the left tail below mode - 14*sqrt(lambda) (mass far
// under the 1e-16 clamp of gauss_to_uniform) is dropped.
long long poisson_quantile_large(double lambda, double p) {
  const long long mode = static_cast<long long>(std::floor(lambda));
  const double log_pmf_mode =
      static_cast<double>(mode) * std::log(lambda) - lambda - std::lgamma(static_cast<double>(mode) + 1.0);
  const double target = p * std::exp(-log_pmf_mode);

  const long long spread = static_cast<long long>(std::ceil(14.0 * std::sqrt(lambda))) + 30;
  const long long klo = std::max<long long>(0, mode - spread);
  const long long cap = mode + spread;

  // scaled pmf at klo via the downward recurrence from the mode
  double term = 1.0;
  for (long long j = mode; j > klo; --j) term *= static_cast<double>(j) / lambda;

  double cum = term;
  double comp = 0.0;
  long long k = klo;
  while (cum < target && k < cap) {
    ++k;
    term *= lambda / static_cast<double>(k);
    const double yv = term - comp;
    const double tv = cum + yv;
    comp = (tv - cum) - yv;
    cum = tv;
  }
  return k;
}

}  // namespace

long long poisson_quantile(double lambda, double p) {
  if (!std::isfinite(lambda) || lambda < 0.0)
    throw std::invalid_argument("poisson_quantile: rate must be finite and non-negative");
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("poisson_quantile: p must lie in (0,1)");
  if (lambda == 0.0) return 0;
  if (lambda > 1e6) {
    const double g = lambda + std::sqrt(lambda) * norm_quantile(p);
    return std::max<long long>(0, std::llround(g));
  }
  if (lambda <= 30.0) return poisson_quantile_small(lambda, p);
  return poisson_quantile_large(lambda, p);
}

namespace {

double pairwise_sum_impl(const double* v, std::size_t count) {
  if (count <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += v[i];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum_impl(v, half) + pairwise_sum_impl(v + half, count - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return pairwise_sum_impl(values.data(), values.size());
}

double log_sum_exp(std::span<const double> values) {
  double mx = -kInf;
  for (double v : values) mx = std::max(mx, v);
  if (!std::isfinite(mx)) return -kInf;
  std::vector<double> shifted(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) shifted[i] = std::exp(values[i] - mx);
  return mx + std::log(pairwise_sum(shifted));
}

}  // namespace skm
