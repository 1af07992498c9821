#include "skm/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace skm {

namespace {
constexpr double kPivotTol = 1e-12;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& mat, PsdSqrtInfo* info) {
  const Eigen::Index n = mat.rows();
  if (mat.cols() != n) throw std::invalid_argument("psd_sqrt: matrix must be square");
  const double scale = std::max(1.0, mat.cwiseAbs().maxCoeff());
  if ((mat - mat.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw std::invalid_argument("psd_sqrt: matrix is not symmetric");

  if (info) *info = PsdSqrtInfo{};

  if (n == 1) {
    const double v = mat(0, 0);
    if (info) {
      info->min_eigenvalue = v;
      info->clamped = v < 0.0;
      info->large_clamp = v < -1e-6 * std::max(std::abs(v), 1e-300);
    }
    Eigen::MatrixXd root(1, 1);
    root(0, 0) = v > 0.0 ? std::sqrt(v) : 0.0;
    return root;
  }

  const Eigen::MatrixXd sym = 0.5 * (mat + mat.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("psd_sqrt: eigendecomposition failed");

  Eigen::VectorXd lam = es.eigenvalues();
  const double min_eig = lam.minCoeff();
  const double norm = sym.cwiseAbs().maxCoeff();
  if (info) {
    info->min_eigenvalue = min_eig;
    info->clamped = min_eig < 0.0;
    info->large_clamp = min_eig < -1e-6 * std::max(norm, 1e-300);
  }
  for (Eigen::Index i = 0; i < n; ++i) lam(i) = lam(i) > 0.0 ? std::sqrt(lam(i)) : 0.0;
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

std::optional<double> gaussian_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                                      const Eigen::MatrixXd& cov) {
  const Eigen::Index p = x.size();
  if (p == 1) {
    const double v = cov(0, 0);
    if (!(v > 0.0)) return std::nullopt;
    const double r = x(0) - mean(0);
    return -0.5 * (std::log(2.0 * M_PI * v) + r * r / v);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  if (ldlt.info() != Eigen::Success) return std::nullopt;
  const Eigen::VectorXd d = ldlt.vectorD();
  const double dmax = d.maxCoeff();
  if (!(dmax > 0.0) || d.minCoeff() <= kPivotTol * dmax) return std::nullopt;
  const Eigen::VectorXd r = x - mean;
  const double quad = r.dot(ldlt.solve(r));
  const double logdet = d.array().log().sum();
  return -0.5 * (static_cast<double>(p) * std::log(2.0 * M_PI) + logdet + quad);
}

bool SpdSolver::factor(const Eigen::MatrixXd& m) {
  if (m.rows() == 1) {
    scalar_ = true;
    const double v = m(0, 0);
    if (!std::isfinite(v) || std::abs(v) <= 0.0) return false;
    inv_ = 1.0 / v;
    return true;
  }
  scalar_ = false;
  ldlt_.compute(m);
  if (ldlt_.info() != Eigen::Success) return false;
  const Eigen::VectorXd d = ldlt_.vectorD().cwiseAbs();
  const double dmax = d.maxCoeff();
  return dmax > 0.0 && d.minCoeff() > kPivotTol * dmax;
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& r) const {
  if (scalar_) return r * inv_;
  return ldlt_.solve(r);
}

Eigen::MatrixXd SpdSolver::solve_matrix(const Eigen::MatrixXd& r) const {
  if (scalar_) return r * inv_;
  return ldlt_.solve(r);
}

std::optional<Eigen::VectorXd> solve_spd(const Eigen::MatrixXd& m, const Eigen::VectorXd& r) {
  if (m.rows() == 1) {
    const double v = m(0, 0);
    if (!(std::abs(v) > 0.0) || !std::isfinite(v)) return std::nullopt;
    if (std::abs(v) < kPivotTol * std::max(1.0, std::abs(v))) return std::nullopt;
    Eigen::VectorXd w(1);
    w(0) = r(0) / v;
    return w;
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success) return std::nullopt;
  const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
  const double dmax = d.maxCoeff();
  if (!(dmax > 0.0) || d.minCoeff() <= kPivotTol * dmax) return std::nullopt;
  return ldlt.solve(r);
}

}  // namespace skm
