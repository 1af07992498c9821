#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "skm/auxvar.hpp"
#include "skm/forward_sim.hpp"
#include "skm/particle_filter.hpp"
#include "skm/prior.hpp"

namespace skm {

/// Gaussian random-walk proposal on log c. The paper-style scale rule applies
/// 2.56^2/v (pseudo-marginal) or 2.38^2/v (innovation scheme) to a pilot
/// posterior covariance.
struct ProposalConfig {
  Eigen::MatrixXd rw_cov;  // v x v, symmetric positive definite
  double rho = 0.99;       // Crank-Nicolson correlation of the auxiliary variables
};

/// Current point of the pseudo-marginal chain.
struct ChainState {
  Eigen::VectorXd log_c;
  AuxiliaryBlock u;
  double log_phat = 0.0;
  double log_prior = 0.0;
};

struct ChainRecord {
  Eigen::VectorXd log_c;
  double log_phat = 0.0;
  bool accepted = false;
};

struct ChainResult {
  std::vector<ChainRecord> records;
  double acceptance_rate = 0.0;
  int init_attempts = 1;
};

/// log of the Metropolis-Hastings ratio before the min: difference of
/// log prior + log likelihood-estimate plus the proposal correction.
/// Returns -inf (never NaN) when the proposed likelihood estimate is dead.
double acceptance_log_ratio(double cur_log_prior, double cur_log_phat, double prop_log_prior,
                            double prop_log_phat, double log_q_cur_given_prop = 0.0,
                            double log_q_prop_given_cur = 0.0);

/// log_c' = log_c + chol(rw_cov) * draw.
Eigen::VectorXd rw_propose(const Eigen::VectorXd& log_c, const Eigen::MatrixXd& rw_cov,
                           const Eigen::VectorXd& gaussian_draw);

/// Correlated pseudo-marginal Metropolis-Hastings. rho = 0 refreshes the
/// auxiliary variables completely and is the plain pseudo-marginal scheme.
/// Per iteration the stream consumption is fixed: v proposal normals, d
/// auxiliary normals, one acceptance uniform.
ChainResult cpmmh_run(const KineticModel& model, const Dataset& data, const ObservationModel& obs,
                      const DiscretisationGrid& grid, const PriorSet& priors,
                      const ProposalConfig& proposal, const FilterConfig& filter_config,
                      int n_iters, std::uint64_t seed, const Eigen::VectorXd& init_log_c);

/// Two-stage tuning: a pilot chain with rw_cov = (0.1^2/v) I, then the main
/// chain with rw_cov = scale_factor * cov(pilot log c second half).
/// Deterministic given the seed; pilot and main streams are derived from it.
struct PilotConfig {
  int pilot_iters = 5000;
  double scale_factor = 0.0;  // 2.56^2/v when <= 0
};

ChainResult cpmmh_run_with_pilot(const KineticModel& model, const Dataset& data,
                                 const ObservationModel& obs, const DiscretisationGrid& grid,
                                 const PriorSet& priors, double rho,
                                 const FilterConfig& filter_config, int n_iters,
                                 std::uint64_t seed, const Eigen::VectorXd& init_log_c,
                                 const PilotConfig& pilot = {},
                                 Eigen::MatrixXd* tuned_cov = nullptr);

/// Sample covariance of the second half of a chain's log_c records, with a
/// small diagonal jitter so a sticky pilot still yields a usable proposal.
Eigen::MatrixXd chain_sample_covariance(const std::vector<ChainRecord>& records);

}  // namespace skm
