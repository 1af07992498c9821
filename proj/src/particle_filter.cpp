#include "skm/particle_filter.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "skm/math_utils.hpp"
#include "skm/parallel.hpp"

namespace skm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCleMatchTol = 1e-9;

struct ParticleWork {
  Eigen::VectorXd x;
  Eigen::VectorXd z;       // per-step normal inputs
  Eigen::VectorXd unif;    // transformed uniforms (Poisson leap)
  Eigen::VectorXd rcount;  // reaction counts (Poisson leap)
  double log_w = 0.0;
  bool alive = true;
};

}  // namespace

std::vector<int> systematic_resample(const Eigen::VectorXd& weights_norm, double base_uniform) {
  const int n = static_cast<int>(weights_norm.size());
  const double total = weights_norm.sum();
  if (!(total > 0.0)) throw std::invalid_argument("systematic_resample: weights sum to zero");
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("systematic_resample: weights must be normalised");
  std::vector<int> ancestors(n);
  double cum = weights_norm(0);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    const double point = (static_cast<double>(i) + base_uniform) / n;
    while (cum < point && k + 1 < n) {
      ++k;
      cum += weights_norm(k);
    }
    ancestors[i] = k;
  }
  return ancestors;
}

std::vector<int> euclidean_sort(const Eigen::MatrixXd& states) {
  const int n = static_cast<int>(states.cols());
  std::vector<int> order(n);
  if (n == 0) return order;

  if (states.rows() == 1) {
    // the greedy chain from the minimum is exactly an ascending sort
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return states(0, a) < states(0, b); });
    return order;
  }

  std::vector<bool> used(n, false);
  int current = 0;
  for (int i = 1; i < n; ++i)
    if (states(0, i) < states(0, current)) current = i;
  order[0] = current;
  used[current] = true;
  for (int step = 1; step < n; ++step) {
    int best = -1;
    double best_dist = kInf;
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      const double d = (states.col(i) - states.col(current)).squaredNorm();
      if (d < best_dist) {
        best_dist = d;
        best = i;
      }
    }
    order[step] = best;
    used[best] = true;
    current = best;
  }
  return order;
}

int aux_per_step_dim(const KineticModel& model, Approximation approx) {
  return approx == Approximation::cle ? model.latent_dim() : model.network.reaction_count();
}

AuxLayout filter_layout(const KineticModel& model, const ObservationModel& obs,
                        const DiscretisationGrid& grid, const FilterConfig& config) {
  // initial state is known in this artifact, so the prior block is empty
  return AuxLayout(obs.n_obs, grid.m, config.num_particles,
                   aux_per_step_dim(model, config.approximation), 0);
}

LikelihoodEstimate run_apf(const KineticModel& model, const Eigen::VectorXd& theta,
                           const Dataset& data, const ObservationModel& obs,
                           const DiscretisationGrid& grid, const AuxiliaryBlock& u,
                           const FilterConfig& config) {
  const int N = config.num_particles;
  const int m = grid.m;
  const int n = data.size();
  const int d_latent = model.latent_dim();
  const int q = aux_per_step_dim(model, config.approximation);
  const double dtau = grid.delta_tau();
  const bool leap = config.approximation == Approximation::poisson_leap;

  if (leap && model.augmentation)
    throw std::invalid_argument("run_apf: the Poisson leap does not support OU augmentation");
  if (n != obs.n_obs) throw std::invalid_argument("run_apf: dataset length != n_obs");
  const AuxLayout& lay = u.layout;
  if (lay.n() != n || lay.m() != m || lay.particles() != N || lay.per_step_dim() != q ||
      lay.init_dim() != 0)
    throw std::invalid_argument("run_apf: auxiliary layout does not match the configuration");
  if (theta.size() != model.param_dim())
    throw std::invalid_argument("run_apf: parameter dimension mismatch");

  const double match_tol = leap ? 0.0 : kCleMatchTol;
  MdbConfig bridge_cfg;
  bridge_cfg.no_information = config.proposal == ProposalKind::bootstrap;
  bridge_cfg.psi_variant = config.psi_variant;

  LikelihoodEstimate est;
  est.step_increments.reserve(n);

  ParticleCloud cloud;
  cloud.states.resize(d_latent, N);
  cloud.log_weights_unnorm.resize(N);
  cloud.weights_norm.resize(N);
  cloud.ancestors.assign(N, 0);

  // t = 1: the initial latent state is known, so all particles coincide and
  // the first factor is just p(y_1 | x_1).
  for (int i = 0; i < N; ++i) cloud.states.col(i) = model.initial_state;
  cloud.log_weights_unnorm.setConstant(
      observation_logdensity(obs, data.y[0], model.initial_state, match_tol));

  std::vector<double> scratch_sum(N);
  auto increment_from = [&](const Eigen::VectorXd& lw) {
    double mx = lw.maxCoeff();
    if (!std::isfinite(mx)) return -kInf;
    for (int i = 0; i < N; ++i) scratch_sum[i] = std::exp(lw(i) - mx);
    return mx + std::log(pairwise_sum(scratch_sum)) - std::log(static_cast<double>(N));
  };
  auto normalise = [&] {
    const double mx = cloud.log_weights_unnorm.maxCoeff();
    for (int i = 0; i < N; ++i)
      cloud.weights_norm(i) = std::exp(cloud.log_weights_unnorm(i) - mx);
    cloud.weights_norm /= cloud.weights_norm.sum();
  };

  double inc = increment_from(cloud.log_weights_unnorm);
  est.step_increments.push_back(inc);
  est.log_phat = inc;
  if (config.record_terminal_states) est.terminal_states.push_back(cloud.states);
  if (!std::isfinite(inc)) {
    est.alive = false;
    est.log_phat = -kInf;
    return est;
  }
  normalise();

  std::vector<ParticleWork> work(N);
  std::vector<BridgeScratch> scratch;
  scratch.reserve(N);
  for (int i = 0; i < N; ++i) {
    work[i].x.resize(d_latent);
    work[i].z.resize(q);
    work[i].unif.resize(q);
    work[i].rcount.resize(q);
    scratch.emplace_back(model, obs.obs_dim());
  }
  Eigen::MatrixXd sorted_states(d_latent, N);
  Eigen::VectorXd sorted_log_w(N);

  for (int t = 2; t <= n; ++t) {
    // 2(a) sort on terminal states, carrying weights along
    const std::vector<int> order = euclidean_sort(cloud.states);
    for (int i = 0; i < N; ++i) {
      sorted_states.col(i) = cloud.states.col(order[i]);
      sorted_log_w(i) = cloud.log_weights_unnorm(order[i]);
    }
    cloud.states.swap(sorted_states);
    cloud.log_weights_unnorm.swap(sorted_log_w);
    normalise();

    // 2(b) systematic resampling from one uniform
    Eigen::VectorXd carry = Eigen::VectorXd::Ones(N);
    if (config.resample) {
      const double base = gauss_to_uniform(u.u(lay.resample_offset(t)));
      cloud.ancestors = systematic_resample(cloud.weights_norm, base);
    } else {
      for (int i = 0; i < N; ++i) cloud.ancestors[i] = i;
      carry = cloud.weights_norm * static_cast<double>(N);
    }

    // 2(c)+2(d) propagate through the m sub-steps and weight
    const Eigen::VectorXd& y = data.y[t - 1];
    auto propagate = [&](int i) {
      ParticleWork& wk = work[i];
      BridgeScratch& sc = scratch[i];
      wk.x = cloud.states.col(cloud.ancestors[i]);
      wk.alive = true;
      double log_g = 0.0, log_p = 0.0;
      bool invalid = false;
      for (int k = 0; k < m && wk.alive; ++k) {
        for (int j = 0; j < q; ++j) wk.z(j) = u.u(lay.prop_offset(t, i, k, j));
        const double delta_k = static_cast<double>(m - k) * dtau;
        StepOutcome so;
        if (leap) {
          for (int j = 0; j < q; ++j) wk.unif(j) = gauss_to_uniform(wk.z(j));
          so = conditioned_hazard_step(model.network, wk.x, wk.rcount, y, delta_k, dtau, obs,
                                       theta, wk.unif, bridge_cfg, sc);
          if (so.state_invalid) invalid = true;
        } else if (obs.error_free() && k == m - 1) {
          so = errorfree_terminal_step(model, wk.x, y, dtau, obs, theta, wk.z, sc);
        } else {
          so = mdb_step(model, wk.x, y, delta_k, dtau, obs, theta, wk.z, bridge_cfg, sc);
        }
        wk.alive = wk.alive && so.alive;
        log_g += so.log_g;
        log_p += so.log_p;
      }
      if (!wk.alive || (leap && invalid)) {
        wk.log_w = -kInf;
        wk.alive = false;
        return;
      }
      const double obs_ld = observation_logdensity(obs, y, wk.x, match_tol);
      wk.log_w = obs_ld + log_p - log_g + std::log(carry(i));
      if (!std::isfinite(wk.log_w)) {
        wk.log_w = -kInf;
        wk.alive = false;
      }
    };
    parallel_for(N, config.threads, propagate);

    for (int i = 0; i < N; ++i) {
      cloud.states.col(i) = work[i].x;
      cloud.log_weights_unnorm(i) = work[i].log_w;
    }
    if (config.genealogy_out) {
      for (int i = 0; i < N; ++i)
        (*config.genealogy_out) << "{\"t\":" << t << ",\"particle\":" << i
                                << ",\"ancestor\":" << cloud.ancestors[i]
                                << ",\"log_weight\":" << cloud.log_weights_unnorm(i) << "}\n";
    }

    // 2(e) likelihood increment = mean unnormalised weight
    inc = increment_from(cloud.log_weights_unnorm);
    est.step_increments.push_back(inc);
    if (!std::isfinite(inc)) {
      est.alive = false;
      est.log_phat = -kInf;
      return est;
    }
    est.log_phat += inc;
    if (config.record_terminal_states) est.terminal_states.push_back(cloud.states);
    normalise();
  }
  return est;
}

}  // namespace skm
