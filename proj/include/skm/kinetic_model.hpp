#pragma once

#include <optional>

#include <Eigen/Dense>

#include "skm/reaction_network.hpp"

namespace skm {

/// Augmentation of a reaction network in which one rate constant is replaced
/// by a latent log-rate following a mean-reverting (log-OU) diffusion:
///   d l_t = speed * (log(level) - l_t) dt + diff * dW_t,   l_t = log c_t.
/// The latent state gains one trailing coordinate holding l_t. The inferred
/// parameter vector (all positive) is laid out as
///   [ base rates with the diffusing slot removed, speed, level, diff ]
/// so that log(level) is the reversion level of the log-rate.
struct AugmentedSDEModel {
  ReactionNetwork base;
  int diffusing_rate_index = 0;
  double initial_log_rate = 0.0;

  int param_dim() const { return base.reaction_count() + 2; }
  int speed_index() const { return base.reaction_count() - 1; }
  int level_index() const { return base.reaction_count(); }
  int diff_index() const { return base.reaction_count() + 1; }

  /// Expands the inferred parameters to the base network's rate vector,
  /// with the diffusing rate set to exp(log_rate).
  Eigen::VectorXd base_rates(const Eigen::VectorXd& theta, double log_rate) const;
};

AugmentedSDEModel augment_with_ou_rate(const ReactionNetwork& net, int diffusing_rate_index,
                                       double initial_log_rate);

/// A latent kinetic model: a reaction network, optionally OU-augmented, with
/// a known initial latent state at the first observation time.
struct KineticModel {
  ReactionNetwork network;
  std::optional<AugmentedSDEModel> augmentation;
  Eigen::VectorXd initial_state;

  int latent_dim() const {
    return augmentation ? network.species_count() + 1 : network.species_count();
  }
  int param_dim() const {
    return augmentation ? augmentation->param_dim() : network.reaction_count();
  }
  void validate() const;
};

struct DriftDiffusion {
  Eigen::VectorXd drift;      // S h, plus the OU drift coordinate when augmented
  Eigen::MatrixXd diffusion;  // S diag(h) S^T, plus the OU diagonal block
  bool hazard_clamped = false;
  bool state_invalid = false;
};

/// CLE drift and diffusion at state x under (positive-scale) parameters theta.
DriftDiffusion drift_diffusion(const KineticModel& model, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& theta);

/// In-place variant for hot paths; members of `out` must be presized
/// (drift: latent_dim, diffusion: latent_dim x latent_dim, scratch_h: v).
void drift_diffusion_into(const KineticModel& model, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& theta, Eigen::VectorXd& scratch_h,
                          DriftDiffusion& out);

}  // namespace skm
