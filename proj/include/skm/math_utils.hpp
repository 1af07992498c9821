#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace skm {

/// Standard normal CDF. Accurate to ~1e-15 relative error through the
/// double range; the caller-facing uniform transform clamps to (1e-16, 1-1e-16).
double norm_cdf(double z);

/// Maps a standard-normal draw to a uniform in (0,1) via the normal CDF,
/// clamped away from {0,1} so downstream inverse-CDF transforms stay finite.
double gauss_to_uniform(double z);

/// Inverse standard normal CDF (Wichura's AS241, double precision).
double norm_quantile(double p);

/// log of the Poisson pmf with mean `mu` at count `k`.
/// mu == 0 gives 0 for k == 0 and -inf otherwise.
double log_poisson_pmf(long long k, double mu);

/// Smallest k with P(Poisson(lambda) <= k) >= p, computed by CDF inversion.
/// Above lambda = 1e6 a continuity-corrected normal quantile is used instead
/// so the inversion cost stays bounded.
long long poisson_quantile(double lambda, double p);

/// Deterministic pairwise summation; independent of any parallel schedule.
double pairwise_sum(std::span<const double> values);

/// log(sum(exp(v))) with max-subtraction; -inf for empty or all -inf input.
double log_sum_exp(std::span<const double> values);

}  // namespace skm
