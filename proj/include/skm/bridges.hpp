#pragma once

#include <optional>

#include <Eigen/Dense>

#include "skm/kinetic_model.hpp"
#include "skm/observation.hpp"

namespace skm {

/// Resolution of the guided-covariance reading: the default scales the
/// Gaussian correction term by delta_tau (this reproduces the error-free
/// full-observation special case exactly); the alternative scales it by the
/// full time-to-observation and is kept for comparison only.
enum class PsiVariant { correction_dtau, correction_delta };

struct MdbConfig {
  bool no_information = false;  // drop the observation correction (bootstrap)
  PsiVariant psi_variant = PsiVariant::correction_dtau;
};

/// Per-step quantities of the modified diffusion bridge.
struct BridgeStepParams {
  Eigen::VectorXd alpha;  // S h
  Eigen::MatrixXd beta;   // S diag(h) S^T
  double delta_to_obs = 0.0;
  Eigen::VectorXd mu;   // guided drift
  Eigen::MatrixXd psi;  // guided covariance (per-step variance is psi * delta_tau)
};

struct StepOutcome {
  bool alive = true;
  bool state_invalid = false;  // negative species count (Poisson leap)
  double log_g = 0.0;          // proposal log-density increment
  double log_p = 0.0;          // model log-density increment
};

/// Reusable workspace; keeps the per-particle sub-stepping allocation-free.
struct BridgeScratch {
  Eigen::VectorXd h, resid, w, corr, mean, noise, hstar, r;
  Eigen::MatrixXd betaP, M, psi_dtau, root;
  DriftDiffusion dd;

  BridgeScratch(const KineticModel& model, int obs_dim);
};

/// Guided drift/covariance of the modified diffusion bridge at state x,
/// time-to-observation delta_k. Nullopt when the information matrix
/// P^T beta P delta_k + Sigma is numerically singular (dead particle).
std::optional<BridgeStepParams> mdb_params(const KineticModel& model, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& y, double delta_k,
                                           double delta_tau, const ObservationModel& obs,
                                           const Eigen::VectorXd& theta, const MdbConfig& config);

/// One guided CLE sub-step: x <- x + mu*dtau + sqrt(psi*dtau) z. Returns the
/// proposal density increment log_g and the Euler forward density increment
/// log_p used by the importance weight.
StepOutcome mdb_step(const KineticModel& model, Eigen::VectorXd& x, const Eigen::VectorXd& y,
                     double delta_k, double delta_tau, const ObservationModel& obs,
                     const Eigen::VectorXd& theta, const Eigen::VectorXd& z,
                     const MdbConfig& config, BridgeScratch& scratch);

/// Terminal sub-step under error-free observation (Sigma = 0): observed
/// components of the end state are pinned to y exactly; unobserved components
/// are drawn from the conditional Gaussian of the Euler step. log_p gains the
/// marginal Euler density of the observed components, log_g gains zero.
StepOutcome errorfree_terminal_step(const KineticModel& model, Eigen::VectorXd& x,
                                    const Eigen::VectorXd& y, double delta_tau,
                                    const ObservationModel& obs, const Eigen::VectorXd& theta,
                                    const Eigen::VectorXd& z, BridgeScratch& scratch);

/// Observation-conditioned reaction hazard
///   h* = h + diag(h) S^T P (P^T beta P delta_k + Sigma)^{-1}
///            {y - P^T (x + alpha delta_k)},
/// clamped at zero componentwise. Nullopt on a singular information matrix.
std::optional<Eigen::VectorXd> conditioned_hazard(const ReactionNetwork& net,
                                                  const Eigen::VectorXd& x,
                                                  const Eigen::VectorXd& y, double delta_k,
                                                  const ObservationModel& obs,
                                                  const Eigen::VectorXd& rates,
                                                  bool no_information);

/// One guided Poisson-leap sub-step: draws reaction counts by inverse CDF at
/// rate h*_j * dtau from the supplied uniforms, advances x <- x + S r, and
/// accumulates log_g (conditioned rates) and log_p (model rates).
StepOutcome conditioned_hazard_step(const ReactionNetwork& net, Eigen::VectorXd& x,
                                    Eigen::VectorXd& r_out, const Eigen::VectorXd& y,
                                    double delta_k, double delta_tau, const ObservationModel& obs,
                                    const Eigen::VectorXd& rates, const Eigen::VectorXd& uniforms,
                                    const MdbConfig& config, BridgeScratch& scratch);

}  // namespace skm
