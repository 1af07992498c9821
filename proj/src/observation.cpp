#include "skm/observation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "skm/linalg.hpp"

namespace skm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void ObservationModel::validate(int latent_dim) const {
  const int p = obs_dim();
  if (P.rows() != latent_dim)
    throw std::invalid_argument("ObservationModel: P has wrong row dimension");
  if (p < 1 || p > latent_dim)
    throw std::invalid_argument("ObservationModel: need 1 <= p <= latent dimension");
  if (Sigma.rows() != p || Sigma.cols() != p)
    throw std::invalid_argument("ObservationModel: Sigma must be p x p");
  const double scale = std::max(1e-300, Sigma.cwiseAbs().maxCoeff());
  if ((Sigma - Sigma.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw std::invalid_argument("ObservationModel: Sigma must be symmetric");
  if (!Sigma.isZero(0.0)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sigma);
    if (es.eigenvalues().minCoeff() < -1e-10 * scale)
      throw std::invalid_argument("ObservationModel: Sigma must be positive semi-definite");
  }
  if (n_obs < 1) throw std::invalid_argument("ObservationModel: n_obs must be >= 1");
}

double observation_logdensity(const ObservationModel& obs, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& x, double match_tol) {
  if (y.size() != obs.obs_dim() || x.size() != obs.P.rows())
    throw std::invalid_argument("observation_logdensity: dimension mismatch");
  const Eigen::VectorXd r = y - obs.P.transpose() * x;

  if (obs.error_free()) return r.cwiseAbs().maxCoeff() <= match_tol ? 0.0 : -kInf;

  if (auto lp = gaussian_logpdf(y, obs.P.transpose() * x, obs.Sigma)) return *lp;

  // Singular but nonzero Sigma: density on the column space, -inf off it.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(obs.Sigma);
  const Eigen::VectorXd lam = es.eigenvalues();
  const double lmax = lam.maxCoeff();
  if (!(lmax > 0.0)) return -kInf;
  const double cut = 1e-12 * lmax;
  const Eigen::VectorXd proj = es.eigenvectors().transpose() * r;
  double quad = 0.0, logdet = 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) > cut) {
      quad += proj(i) * proj(i) / lam(i);
      logdet += std::log(lam(i));
      ++rank;
    } else if (std::abs(proj(i)) > 1e-9 * std::max(1.0, r.norm())) {
      return -kInf;  // residual outside the degenerate covariance's range
    }
  }
  return -0.5 * (rank * std::log(2.0 * M_PI) + logdet + quad);
}

}  // namespace skm
