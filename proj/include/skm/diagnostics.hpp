#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "skm/forward_sim.hpp"
#include "skm/particle_filter.hpp"

namespace skm {

struct EssResult {
  double ess = 0.0;
  bool degenerate = false;  // constant series
};

/// Effective sample size n / (1 + 2 sum of autocorrelations), truncated by
/// Geyer's initial positive sequence rule. Requires length >= 10.
EssResult ess(const std::vector<double>& series);

/// Minimum ESS across the columns of a sample matrix (rows = draws).
double min_ess(const Eigen::MatrixXd& draws);

struct ProbeResult {
  double value = 0.0;      // variance or correlation estimate
  int replicates = 0;      // finite estimates used
  int deaths = 0;          // replicates discarded for a -inf estimate
};

/// Sample variance of independent log-likelihood estimates at a central
/// parameter value. Dead estimates are excluded and counted separately.
ProbeResult probe_sigma2(const KineticModel& model, const Dataset& data,
                         const ObservationModel& obs, const DiscretisationGrid& grid,
                         const Eigen::VectorXd& theta_center, const FilterConfig& config,
                         int replicates, std::uint64_t seed);

/// Correlation between log-estimates at u and at one Crank-Nicolson step
/// from u, estimated over independent replicate pairs.
ProbeResult probe_rho_l(const KineticModel& model, const Dataset& data,
                        const ObservationModel& obs, const DiscretisationGrid& grid,
                        const Eigen::VectorXd& theta_center, const FilterConfig& config,
                        double rho, int replicates, std::uint64_t seed);

struct Recommendation {
  int N = 0;
  double target = 0.0;   // 2.16 / (1 - rho_l^2)
  bool reachable = true; // false when no probed N met the target
};

/// Smallest probed N whose sigma^2 estimate meets the 2.16/(1-rho_l^2)
/// target; the largest probed N (flagged) when unreachable.
Recommendation recommend_N(const std::map<int, double>& sigma2_by_N, double rho_l);

struct TuningReport {
  std::map<int, double> sigma2_by_N;
  std::map<int, double> rho_l_by_N;
  std::map<int, int> deaths_by_N;
  double rho = 0.0;
  double rho_l = 0.0;  // the estimate used for the recommendation (largest N)
  Recommendation recommendation;
  int replicates = 0;
  std::uint64_t seed = 0;
};

}  // namespace skm
