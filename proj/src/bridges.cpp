#include "skm/bridges.hpp"

#include <cmath>
#include <limits>

#include "skm/linalg.hpp"
#include "skm/math_utils.hpp"

namespace skm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Gaussian log-density of x_next around `mean` with covariance `cov`,
// tolerating an exactly deterministic step (zero covariance, matching mean).
std::optional<double> euler_increment_logpdf(const Eigen::VectorXd& x_next,
                                             const Eigen::VectorXd& mean,
                                             const Eigen::MatrixXd& cov) {
  if (cov.cwiseAbs().maxCoeff() == 0.0) {
    return ((x_next - mean).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, mean.norm()))
               ? std::optional<double>(0.0)
               : std::nullopt;
  }
  return gaussian_logpdf(x_next, mean, cov);
}

}  // namespace

BridgeScratch::BridgeScratch(const KineticModel& model, int obs_dim) {
  const int d = model.latent_dim();
  const int v = model.network.reaction_count();
  h.resize(v);
  hstar.resize(v);
  r.resize(v);
  resid.resize(obs_dim);
  w.resize(obs_dim);
  corr.resize(d);
  mean.resize(d);
  noise.resize(d);
  betaP.resize(d, obs_dim);
  M.resize(obs_dim, obs_dim);
  psi_dtau.resize(d, d);
  root.resize(d, d);
  dd.drift.resize(d);
  dd.diffusion.resize(d, d);
}

std::optional<BridgeStepParams> mdb_params(const KineticModel& model, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& y, double delta_k,
                                           double delta_tau, const ObservationModel& obs,
                                           const Eigen::VectorXd& theta, const MdbConfig& config) {
  BridgeStepParams out;
  DriftDiffusion dd = drift_diffusion(model, x, theta);
  out.alpha = dd.drift;
  out.beta = dd.diffusion;
  out.delta_to_obs = delta_k;
  if (config.no_information) {
    out.mu = out.alpha;
    out.psi = out.beta;
    return out;
  }
  const Eigen::MatrixXd betaP = out.beta * obs.P;
  const Eigen::MatrixXd M = obs.P.transpose() * betaP * delta_k + obs.Sigma;
  SpdSolver solver;
  if (!solver.factor(M)) return std::nullopt;
  const Eigen::VectorXd resid = y - obs.P.transpose() * (x + out.alpha * delta_k);
  out.mu = out.alpha + betaP * solver.solve(resid);
  const double corr_scale =
      (config.psi_variant == PsiVariant::correction_dtau) ? delta_tau : delta_k;
  out.psi = out.beta - betaP * solver.solve_matrix(betaP.transpose()) * corr_scale;
  return out;
}

StepOutcome mdb_step(const KineticModel& model, Eigen::VectorXd& x, const Eigen::VectorXd& y,
                     double delta_k, double delta_tau, const ObservationModel& obs,
                     const Eigen::VectorXd& theta, const Eigen::VectorXd& z,
                     const MdbConfig& config, BridgeScratch& s) {
  StepOutcome out;
  drift_diffusion_into(model, x, theta, s.h, s.dd);
  out.state_invalid = s.dd.state_invalid;
  const Eigen::VectorXd& alpha = s.dd.drift;
  const Eigen::MatrixXd& beta = s.dd.diffusion;

  // all-zero diffusion: model and proposal are the same point mass
  if (beta.cwiseAbs().maxCoeff() == 0.0) {
    x += alpha * delta_tau;
    return out;
  }

  if (config.no_information) {
    // bootstrap proposal: proposal and model densities cancel exactly
    s.mean = x + alpha * delta_tau;
    s.psi_dtau = beta * delta_tau;
    s.root = psd_sqrt(s.psi_dtau);
    s.noise.noalias() = s.root * z;
    x = s.mean + s.noise;
    return out;
  }

  s.betaP.noalias() = beta * obs.P;
  s.M.noalias() = obs.P.transpose() * s.betaP * delta_k;
  s.M += obs.Sigma;
  SpdSolver solver;
  if (!solver.factor(s.M)) {
    out.alive = false;
    return out;
  }
  s.resid = y - obs.P.transpose() * (x + alpha * delta_k);
  s.corr.noalias() = s.betaP * solver.solve(s.resid);

  const double corr_scale =
      (config.psi_variant == PsiVariant::correction_dtau) ? delta_tau : delta_k;
  s.psi_dtau.noalias() = s.betaP * solver.solve_matrix(s.betaP.transpose());
  s.psi_dtau = (beta - s.psi_dtau * corr_scale) * delta_tau;

  const Eigen::VectorXd euler_mean = x + alpha * delta_tau;
  s.mean = euler_mean + s.corr * delta_tau;
  s.root = psd_sqrt(s.psi_dtau);
  s.noise.noalias() = s.root * z;
  x = s.mean + s.noise;

  auto lg = euler_increment_logpdf(x, s.mean, s.psi_dtau);
  auto lp = euler_increment_logpdf(x, euler_mean, beta * delta_tau);
  if (!lg || !lp || !std::isfinite(*lg) || !std::isfinite(*lp)) {
    out.alive = false;
    return out;
  }
  out.log_g = *lg;
  out.log_p = *lp;
  return out;
}

StepOutcome errorfree_terminal_step(const KineticModel& model, Eigen::VectorXd& x,
                                    const Eigen::VectorXd& y, double delta_tau,
                                    const ObservationModel& obs, const Eigen::VectorXd& theta,
                                    const Eigen::VectorXd& z, BridgeScratch& s) {
  StepOutcome out;
  drift_diffusion_into(model, x, theta, s.h, s.dd);
  out.state_invalid = s.dd.state_invalid;
  const Eigen::VectorXd a = x + s.dd.drift * delta_tau;  // Euler mean
  const Eigen::MatrixXd V = s.dd.diffusion * delta_tau;  // Euler covariance

  // marginal Euler density of the observed components: the entire importance
  // weight of a pinned step, since proposal and target share the conditional
  const Eigen::MatrixXd PtVP = obs.P.transpose() * V * obs.P;
  auto marginal = euler_increment_logpdf(y, obs.P.transpose() * a, PtVP);
  if (!marginal || !std::isfinite(*marginal)) {
    out.alive = false;
    return out;
  }
  out.log_p = *marginal;
  out.log_g = 0.0;

  if (PtVP.cwiseAbs().maxCoeff() == 0.0) {
    x = a;  // deterministic step that happened to match the observation
  } else {
    SpdSolver solver;
    if (!solver.factor(PtVP)) {
      out.alive = false;
      return out;
    }
    const Eigen::MatrixXd VP = V * obs.P;
    s.mean = a + VP * solver.solve(y - obs.P.transpose() * a);
    const Eigen::MatrixXd cond_cov = V - VP * solver.solve_matrix(VP.transpose());
    s.root = psd_sqrt(cond_cov);
    x = s.mean + s.root * z;
  }

  // enforce the pin exactly on the observed components
  SpdSolver pin;
  if (pin.factor(obs.P.transpose() * obs.P)) x += obs.P * pin.solve(y - obs.P.transpose() * x);
  return out;
}

std::optional<Eigen::VectorXd> conditioned_hazard(const ReactionNetwork& net,
                                                  const Eigen::VectorXd& x,
                                                  const Eigen::VectorXd& y, double delta_k,
                                                  const ObservationModel& obs,
                                                  const Eigen::VectorXd& rates,
                                                  bool no_information) {
  HazardResult hz = hazard(net, x, rates);
  if (no_information) return hz.h;
  const Eigen::MatrixXd& S = net.stoich();
  const Eigen::VectorXd alpha = S * hz.h;
  const Eigen::MatrixXd beta = S * hz.h.asDiagonal() * S.transpose();
  const Eigen::MatrixXd M = obs.P.transpose() * beta * obs.P * delta_k + obs.Sigma;
  SpdSolver solver;
  if (!solver.factor(M)) return std::nullopt;
  const Eigen::VectorXd resid = y - obs.P.transpose() * (x + alpha * delta_k);
  Eigen::VectorXd hstar =
      hz.h + hz.h.asDiagonal() * (S.transpose() * (obs.P * solver.solve(resid)));
  return hstar.cwiseMax(0.0);
}

StepOutcome conditioned_hazard_step(const ReactionNetwork& net, Eigen::VectorXd& x,
                                    Eigen::VectorXd& r_out, const Eigen::VectorXd& y,
                                    double delta_k, double delta_tau, const ObservationModel& obs,
                                    const Eigen::VectorXd& rates, const Eigen::VectorXd& uniforms,
                                    const MdbConfig& config, BridgeScratch& s) {
  StepOutcome out;
  const int v = net.reaction_count();
  const Eigen::MatrixXd& S = net.stoich();

  bool clamped = false, invalid = false;
  hazard_into(net, x, rates, s.h, clamped, invalid);
  out.state_invalid = invalid;

  if (config.no_information) {
    s.hstar = s.h;
  } else {
    s.betaP.noalias() = S * (s.h.asDiagonal() * (S.transpose() * obs.P));
    s.M.noalias() = obs.P.transpose() * s.betaP * delta_k;
    s.M += obs.Sigma;
    SpdSolver solver;
    if (!solver.factor(s.M)) {
      out.alive = false;
      return out;
    }
    s.resid = y - obs.P.transpose() * (x + S * s.h * delta_k);
    s.hstar = s.h + s.h.asDiagonal() * (S.transpose() * (obs.P * solver.solve(s.resid)));
    s.hstar = s.hstar.cwiseMax(0.0);
  }

  for (int j = 0; j < v; ++j) {
    const long long rj = poisson_quantile(s.hstar(j) * delta_tau, uniforms(j));
    r_out(j) = static_cast<double>(rj);
    out.log_g += log_poisson_pmf(rj, s.hstar(j) * delta_tau);
    out.log_p += log_poisson_pmf(rj, s.h(j) * delta_tau);
  }
  if (out.log_p == -kInf) out.alive = false;
  x += S * r_out;
  return out;
}

}  // namespace skm
