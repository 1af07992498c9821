#pragma once

#include <optional>

#include <Eigen/Dense>

namespace skm {

struct PsdSqrtInfo {
  double min_eigenvalue = 0.0;  // before clamping
  bool clamped = false;         // any eigenvalue was raised to zero
  bool large_clamp = false;     // clamp magnitude exceeded 1e-6 * ||input||
};

/// Symmetric (spectral) square root of a symmetric PSD matrix. Eigenvalues
/// below zero are clamped to zero; clamps beyond 1e-6 * ||input|| are flagged
/// through `info`. Throws on asymmetric input (tolerance 1e-8).
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& mat, PsdSqrtInfo* info = nullptr);

/// Multivariate Gaussian log-density with positive-definite covariance.
/// Returns nullopt when the covariance is not numerically PD (relative
/// pivot tolerance 1e-12).
std::optional<double> gaussian_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                                      const Eigen::MatrixXd& cov);

/// Solves M w = r for symmetric M via LDLT with a relative pivot tolerance
/// of 1e-12; nullopt flags a numerically singular system.
std::optional<Eigen::VectorXd> solve_spd(const Eigen::MatrixXd& m, const Eigen::VectorXd& r);

/// Factor-once symmetric solver with the same 1e-12 relative pivot tolerance.
/// Scalar systems bypass the LDLT machinery.
class SpdSolver {
 public:
  /// Returns false when the matrix is numerically singular or indefinite.
  bool factor(const Eigen::MatrixXd& m);

  Eigen::VectorXd solve(const Eigen::VectorXd& r) const;
  Eigen::MatrixXd solve_matrix(const Eigen::MatrixXd& r) const;

 private:
  bool scalar_ = false;
  double inv_ = 0.0;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
};

}  // namespace skm
