#pragma once

#include <Eigen/Dense>

namespace skm {

/// Linear-Gaussian observation model y_t = P^T x_t + eps_t, eps_t ~ N(0, Sigma),
/// on a regular unit grid of observation times 1..n. Sigma = 0 is the exact
/// (error-free) observation regime.
struct ObservationModel {
  Eigen::MatrixXd P;      // latent_dim x p
  Eigen::MatrixXd Sigma;  // p x p, symmetric PSD, possibly exactly zero
  int n_obs = 0;
  double inter_obs_interval = 1.0;

  int obs_dim() const { return static_cast<int>(P.cols()); }
  bool error_free() const { return Sigma.isZero(0.0); }

  /// Throws if dimensions are inconsistent, Sigma is asymmetric or has an
  /// eigenvalue below -1e-10 * ||Sigma||, or p > latent dimension.
  void validate(int latent_dim) const;
};

/// log N(y; P^T x, Sigma). With Sigma = 0 this is exact-match semantics:
/// 0 when max|y - P^T x| <= match_tol and -inf otherwise (match_tol = 0
/// gives exact equality, the Poisson-leap convention; the CLE uses 1e-9).
/// A singular nonzero Sigma yields the density on its column space, or -inf
/// when the residual leaves that space.
double observation_logdensity(const ObservationModel& obs, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& x, double match_tol = 0.0);

}  // namespace skm
