#include "skm/mis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "skm/bridges.hpp"
#include "skm/linalg.hpp"
#include "skm/rng.hpp"

namespace skm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct StepLaw {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Pinned-bridge step law within an interval: `remaining` sub-steps to the
// fixed endpoint x_end.
StepLaw pinned_step_law(const KineticModel& model, const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& x, const Eigen::VectorXd& x_end, int remaining,
                        double dtau) {
  const DriftDiffusion dd = drift_diffusion(model, x, theta);
  StepLaw law;
  law.mean = x + (x_end - x) / static_cast<double>(remaining);
  law.cov = dd.diffusion * (dtau * static_cast<double>(remaining - 1) /
                            static_cast<double>(remaining));
  return law;
}

// Observation-guided step law (soft end), delta_k sub-intervals from the
// observation.
std::optional<StepLaw> soft_step_law(const KineticModel& model, const Eigen::VectorXd& theta,
                                     const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                     double delta_k, double dtau, const ObservationModel& obs) {
  auto params = mdb_params(model, x, y, delta_k, dtau, obs, theta, MdbConfig{});
  if (!params) return std::nullopt;
  StepLaw law;
  law.mean = x + params->mu * dtau;
  law.cov = params->psi * dtau;
  return law;
}

}  // namespace

std::optional<InnovationPath> innovation_map_inverse(const GridPath& path,
                                                     const Eigen::VectorXd& theta,
                                                     const KineticModel& model,
                                                     const DiscretisationGrid& grid) {
  const int m = grid.m;
  const int n_grid = static_cast<int>(path.cols());
  const int intervals = (n_grid - 1) / m;
  const double dtau = grid.delta_tau();
  InnovationPath out;
  out.z.reserve(static_cast<std::size_t>(intervals) * std::max(0, m - 1));
  for (int a = 0; a < intervals; ++a) {
    const Eigen::VectorXd x_end = path.col((a + 1) * m);
    for (int k = 0; k + 1 < m; ++k) {
      const Eigen::VectorXd x = path.col(a * m + k);
      const StepLaw law = pinned_step_law(model, theta, x, x_end, m - k, dtau);
      const Eigen::MatrixXd root = psd_sqrt(law.cov);
      SpdSolver solver;
      if (!solver.factor(root)) return std::nullopt;
      out.z.push_back(solver.solve(path.col(a * m + k + 1) - law.mean));
    }
  }
  return out;
}

std::optional<GridPath> innovation_map(const InnovationPath& z, const Eigen::VectorXd& theta,
                                       const KineticModel& model, const DiscretisationGrid& grid,
                                       const GridPath& pins) {
  const int m = grid.m;
  const int n_grid = static_cast<int>(pins.cols());
  const int intervals = (n_grid - 1) / m;
  const double dtau = grid.delta_tau();
  if (static_cast<int>(z.z.size()) != intervals * std::max(0, m - 1))
    throw std::invalid_argument("innovation_map: innovation path has wrong length");
  GridPath out = pins;
  std::size_t zi = 0;
  for (int a = 0; a < intervals; ++a) {
    const Eigen::VectorXd x_end = pins.col((a + 1) * m);
    for (int k = 0; k + 1 < m; ++k) {
      const Eigen::VectorXd x = out.col(a * m + k);
      const StepLaw law = pinned_step_law(model, theta, x, x_end, m - k, dtau);
      out.col(a * m + k + 1) = law.mean + psd_sqrt(law.cov) * z.z[zi++];
    }
  }
  return out;
}

double mis_jacobian_log_det(const GridPath& path, const Eigen::VectorXd& theta,
                            const KineticModel& model, const DiscretisationGrid& grid) {
  const int m = grid.m;
  const int intervals = (static_cast<int>(path.cols()) - 1) / m;
  double total = 0.0;
  for (int a = 0; a < intervals; ++a) {
    for (int k = 0; k + 1 < m; ++k) {
      const DriftDiffusion dd = drift_diffusion(model, path.col(a * m + k), theta);
      if (dd.diffusion.rows() == 1) {
        const double b = dd.diffusion(0, 0);
        if (!(b > 0.0)) return -kInf;
        total += -0.5 * std::log(b);
        continue;
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(dd.diffusion);
      if (ldlt.info() != Eigen::Success) return -kInf;
      const Eigen::VectorXd d = ldlt.vectorD();
      if (d.minCoeff() <= 0.0) return -kInf;
      total += -0.5 * d.array().log().sum();
    }
  }
  return total;
}

double euler_path_logdensity(const GridPath& path, const Eigen::VectorXd& theta,
                             const KineticModel& model, const DiscretisationGrid& grid) {
  const double dtau = grid.delta_tau();
  double total = 0.0;
  for (int g = 0; g + 1 < path.cols(); ++g) {
    const DriftDiffusion dd = drift_diffusion(model, path.col(g), theta);
    auto lp = gaussian_logpdf(path.col(g + 1), path.col(g) + dd.drift * dtau,
                              dd.diffusion * dtau);
    if (!lp || !std::isfinite(*lp)) return -kInf;
    total += *lp;
  }
  return total;
}

namespace {

// Sum of pinned-bridge step densities over every interval's interior points.
double pinned_proposal_logdensity(const GridPath& path, const Eigen::VectorXd& theta,
                                  const KineticModel& model, const DiscretisationGrid& grid) {
  const int m = grid.m;
  const int intervals = (static_cast<int>(path.cols()) - 1) / m;
  const double dtau = grid.delta_tau();
  double total = 0.0;
  for (int a = 0; a < intervals; ++a) {
    const Eigen::VectorXd x_end = path.col((a + 1) * m);
    for (int k = 0; k + 1 < m; ++k) {
      const StepLaw law = pinned_step_law(model, theta, path.col(a * m + k), x_end, m - k, dtau);
      auto lg = gaussian_logpdf(path.col(a * m + k + 1), law.mean, law.cov);
      if (!lg || !std::isfinite(*lg)) return -kInf;
      total += *lg;
    }
  }
  return total;
}

// Euler log-density over grid columns [from, to).
double euler_range_logdensity(const GridPath& path, int from, int to,
                              const Eigen::VectorXd& theta, const KineticModel& model,
                              double dtau) {
  double total = 0.0;
  for (int g = from; g < to; ++g) {
    const DriftDiffusion dd = drift_diffusion(model, path.col(g), theta);
    auto lp = gaussian_logpdf(path.col(g + 1), path.col(g) + dd.drift * dtau,
                              dd.diffusion * dtau);
    if (!lp || !std::isfinite(*lp)) return -kInf;
    total += *lp;
  }
  return total;
}

struct BlockProposal {
  bool ok = false;
  double log_g = 0.0;
};

// Samples the pinned interiors of interval a into `path` (columns are
// overwritten); returns the proposal log-density.
BlockProposal propose_pinned_interval(GridPath& path, int a, const Eigen::VectorXd& theta,
                                      const KineticModel& model, const DiscretisationGrid& grid,
                                      Rng& rng) {
  const int m = grid.m;
  const double dtau = grid.delta_tau();
  const Eigen::VectorXd x_end = path.col((a + 1) * m);
  BlockProposal out;
  for (int k = 0; k + 1 < m; ++k) {
    const StepLaw law = pinned_step_law(model, theta, path.col(a * m + k), x_end, m - k, dtau);
    const Eigen::MatrixXd root = psd_sqrt(law.cov);
    path.col(a * m + k + 1) = law.mean + root * rng.normal_vector(law.mean.size());
    auto lg = gaussian_logpdf(path.col(a * m + k + 1), law.mean, law.cov);
    if (!lg || !std::isfinite(*lg)) return out;
    out.log_g += *lg;
  }
  out.ok = true;
  return out;
}

double density_pinned_interval(const GridPath& path, int a, const Eigen::VectorXd& theta,
                               const KineticModel& model, const DiscretisationGrid& grid) {
  const int m = grid.m;
  const double dtau = grid.delta_tau();
  const Eigen::VectorXd x_end = path.col((a + 1) * m);
  double total = 0.0;
  for (int k = 0; k + 1 < m; ++k) {
    const StepLaw law = pinned_step_law(model, theta, path.col(a * m + k), x_end, m - k, dtau);
    auto lg = gaussian_logpdf(path.col(a * m + k + 1), law.mean, law.cov);
    if (!lg || !std::isfinite(*lg)) return -kInf;
    total += *lg;
  }
  return total;
}

// Soft-bridge sampling of columns a*m+1 .. (a+1)*m toward observation y.
BlockProposal propose_soft_interval(GridPath& path, int a, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& theta, const KineticModel& model,
                                    const DiscretisationGrid& grid, const ObservationModel& obs,
                                    Rng& rng) {
  const int m = grid.m;
  const double dtau = grid.delta_tau();
  BlockProposal out;
  for (int k = 0; k < m; ++k) {
    auto law = soft_step_law(model, theta, path.col(a * m + k), y,
                             static_cast<double>(m - k) * dtau, dtau, obs);
    if (!law) return out;
    const Eigen::MatrixXd root = psd_sqrt(law->cov);
    path.col(a * m + k + 1) = law->mean + root * rng.normal_vector(law->mean.size());
    auto lg = gaussian_logpdf(path.col(a * m + k + 1), law->mean, law->cov);
    if (!lg || !std::isfinite(*lg)) return out;
    out.log_g += *lg;
  }
  out.ok = true;
  return out;
}

double density_soft_interval(const GridPath& path, int a, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& theta, const KineticModel& model,
                             const DiscretisationGrid& grid, const ObservationModel& obs) {
  const int m = grid.m;
  const double dtau = grid.delta_tau();
  double total = 0.0;
  for (int k = 0; k < m; ++k) {
    auto law = soft_step_law(model, theta, path.col(a * m + k), y,
                             static_cast<double>(m - k) * dtau, dtau, obs);
    if (!law) return -kInf;
    auto lg = gaussian_logpdf(path.col(a * m + k + 1), law->mean, law->cov);
    if (!lg || !std::isfinite(*lg)) return -kInf;
    total += *lg;
  }
  return total;
}

}  // namespace

MisResult mis_run(const KineticModel& model, const Dataset& data, const ObservationModel& obs,
                  const DiscretisationGrid& grid, const PriorSet& priors, const MisConfig& config,
                  const Eigen::VectorXd& init_log_c) {
  if (model.augmentation)
    throw std::invalid_argument("mis_run: OU-augmented models are not supported");
  if (obs.obs_dim() != model.latent_dim())
    throw std::invalid_argument("mis_run: requires observation of every component");
  const int v = model.param_dim();
  if (init_log_c.size() != v || priors.size() != v)
    throw std::invalid_argument("mis_run: parameter dimension mismatch");

  const int n = data.size();
  const int m = grid.m;
  const int d = model.latent_dim();
  const double dtau = grid.delta_tau();
  const bool pinned_data = obs.error_free();

  Eigen::LLT<Eigen::MatrixXd> llt(config.rw_cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("mis_run: rw_cov is not positive definite");
  const Eigen::MatrixXd chol = llt.matrixL();

  // observation anchors in latent coordinates
  Eigen::MatrixXd Pt_inv = obs.P.transpose().inverse();
  GridPath path(d, (n - 1) * m + 1);
  std::vector<Eigen::VectorXd> anchors(n);
  anchors[0] = model.initial_state;
  for (int t = 1; t < n; ++t) anchors[t] = Pt_inv * data.y[t];
  // initialise by linear interpolation between anchors
  for (int a = 0; a + 1 < n; ++a)
    for (int k = 0; k <= m; ++k)
      path.col(a * m + k) =
          anchors[a] + (anchors[a + 1] - anchors[a]) * (static_cast<double>(k) / m);

  Rng rng(config.seed);
  Eigen::VectorXd log_c = init_log_c;
  Eigen::VectorXd theta = log_c.array().exp();
  double log_prior = priors.log_density_log_scale(log_c);
  if (!std::isfinite(log_prior))
    throw std::runtime_error("mis_run: initial point outside the prior support");

  MisResult result;
  result.records.reserve(config.n_iters);
  long long path_props = 0, path_accepts = 0;
  long long param_props = 0, param_accepts = 0;

  GridPath prop_path = path;
  const double obs_match_tol = 1e-9;

  for (int iter = 1; iter <= config.n_iters; ++iter) {
    // (1) path updates
    if (pinned_data) {
      // every observation state is data; update interval interiors only
      for (int a = 0; a + 1 < n && m > 1; ++a) {
        prop_path = path;
        const BlockProposal bp = propose_pinned_interval(prop_path, a, theta, model, grid, rng);
        ++path_props;
        if (!bp.ok) continue;
        const double cur_g = density_pinned_interval(path, a, theta, model, grid);
        const double prop_p = euler_range_logdensity(prop_path, a * m, (a + 1) * m, theta, model, dtau);
        const double cur_p = euler_range_logdensity(path, a * m, (a + 1) * m, theta, model, dtau);
        const double log_ratio = (prop_p - bp.log_g) - (cur_p - cur_g);
        if (std::log(rng.uniform()) < log_ratio) {
          path = prop_path;
          ++path_accepts;
        }
      }
    } else {
      // overlapping two-interval blocks interiorising each observation state,
      // then a final half block for the last observation
      for (int t = 2; t <= n; ++t) {
        const bool half = (t == n);
        const int a_left = t - 2;
        prop_path = path;
        BlockProposal bp = propose_soft_interval(prop_path, a_left, data.y[t - 1], theta, model,
                                                 grid, obs, rng);
        ++path_props;
        if (!bp.ok) continue;
        double prop_g = bp.log_g;
        double cur_g =
            density_soft_interval(path, a_left, data.y[t - 1], theta, model, grid, obs);
        int right_end = (a_left + 1) * m;
        if (!half) {
          const BlockProposal bp2 =
              propose_pinned_interval(prop_path, a_left + 1, theta, model, grid, rng);
          if (!bp2.ok) continue;
          prop_g += bp2.log_g;
          cur_g += density_pinned_interval(path, a_left + 1, theta, model, grid);
          right_end = (a_left + 2) * m;
        }
        const double prop_p =
            euler_range_logdensity(prop_path, a_left * m, right_end, theta, model, dtau);
        const double cur_p =
            euler_range_logdensity(path, a_left * m, right_end, theta, model, dtau);
        const double prop_obs =
            observation_logdensity(obs, data.y[t - 1], prop_path.col((t - 1) * m), obs_match_tol);
        const double cur_obs =
            observation_logdensity(obs, data.y[t - 1], path.col((t - 1) * m), obs_match_tol);
        const double log_ratio = (prop_p + prop_obs - prop_g) - (cur_p + cur_obs - cur_g);
        if (std::log(rng.uniform()) < log_ratio) {
          path = prop_path;
          ++path_accepts;
        }
      }
    }

    // (2) parameter update conditioned on the innovations: the target in
    // (c, z) coordinates is pi0(c) p(f(z)|c) / g_pinned(f(z)|c), the proposal
    // density absorbing the change-of-variables Jacobian
    ++param_props;
    const Eigen::VectorXd draw = rng.normal_vector(v);
    const double accept_u = rng.uniform();
    const Eigen::VectorXd prop_log_c = log_c + chol * draw;
    const double prop_prior = priors.log_density_log_scale(prop_log_c);
    if (std::isfinite(prop_prior)) {
      const Eigen::VectorXd prop_theta = prop_log_c.array().exp();
      bool accept = false;
      if (m == 1) {
        const double cur_p = euler_path_logdensity(path, theta, model, grid);
        const double prop_p = euler_path_logdensity(path, prop_theta, model, grid);
        accept = std::log(accept_u) < (prop_prior + prop_p) - (log_prior + cur_p);
        if (accept) {
          log_c = prop_log_c;
          theta = prop_theta;
          log_prior = prop_prior;
          ++param_accepts;
        }
      } else {
        auto z = innovation_map_inverse(path, theta, model, grid);
        if (z) {
          auto reconstructed = innovation_map(*z, prop_theta, model, grid, path);
          if (reconstructed) {
            const double cur_p = euler_path_logdensity(path, theta, model, grid);
            const double cur_g = pinned_proposal_logdensity(path, theta, model, grid);
            const double prop_p = euler_path_logdensity(*reconstructed, prop_theta, model, grid);
            const double prop_g =
                pinned_proposal_logdensity(*reconstructed, prop_theta, model, grid);
            const double log_ratio =
                (prop_prior + prop_p - prop_g) - (log_prior + cur_p - cur_g);
            if (std::log(accept_u) < log_ratio) {
              log_c = prop_log_c;
              theta = prop_theta;
              log_prior = prop_prior;
              path = std::move(*reconstructed);
              ++param_accepts;
              accept = true;
            }
          }
        }
      }
      result.records.push_back({log_c, euler_path_logdensity(path, theta, model, grid), accept});
      continue;
    }
    result.records.push_back({log_c, euler_path_logdensity(path, theta, model, grid), false});
  }

  result.param_acceptance_rate =
      static_cast<double>(param_accepts) / std::max<long long>(1, param_props);
  result.path_acceptance_rate =
      static_cast<double>(path_accepts) / std::max<long long>(1, path_props);
  return result;
}

MisResult mis_run_with_pilot(const KineticModel& model, const Dataset& data,
                             const ObservationModel& obs, const DiscretisationGrid& grid,
                             const PriorSet& priors, int n_iters, std::uint64_t seed,
                             const Eigen::VectorXd& init_log_c, int pilot_iters) {
  const int v = model.param_dim();
  MisConfig stage1;
  stage1.n_iters = pilot_iters;
  stage1.seed = derive_seed(seed, 1);
  stage1.rw_cov = (0.01 / static_cast<double>(v)) * Eigen::MatrixXd::Identity(v, v);
  const MisResult pilot = mis_run(model, data, obs, grid, priors, stage1, init_log_c);

  MisConfig stage2;
  stage2.n_iters = n_iters;
  stage2.seed = derive_seed(seed, 2);
  stage2.rw_cov =
      (2.38 * 2.38 / static_cast<double>(v)) * chain_sample_covariance(pilot.records);
  return mis_run(model, data, obs, grid, priors, stage2, pilot.records.back().log_c);
}

}  // namespace skm
