#include "skm/forward_sim.hpp"

#include <cmath>
#include <stdexcept>

#include "skm/linalg.hpp"
#include "skm/math_utils.hpp"
#include "skm/rng.hpp"

namespace skm {

LatentPath gillespie_simulate(const ReactionNetwork& net, const Eigen::VectorXd& rates,
                              const Eigen::VectorXd& x0, double horizon,
                              const std::vector<double>& record_times, std::uint64_t seed) {
  if (!(horizon > 0.0)) throw std::invalid_argument("gillespie_simulate: horizon must be > 0");
  for (std::size_t i = 1; i < record_times.size(); ++i)
    if (record_times[i] < record_times[i - 1])
      throw std::invalid_argument("gillespie_simulate: record times must be non-decreasing");

  Rng rng(seed);
  LatentPath path;
  path.times = record_times;
  path.states.reserve(record_times.size());

  Eigen::VectorXd x = x0;
  Eigen::VectorXd h(net.reaction_count());
  double t = 0.0;
  std::size_t rec = 0;
  bool clamped = false, invalid = false;

  while (rec < record_times.size()) {
    hazard_into(net, x, rates, h, clamped, invalid);
    const double h0 = h.sum();
    if (!(h0 > 0.0)) break;  // absorbed
    const double dt = -std::log(rng.uniform()) / h0;
    const double t_next = t + dt;
    // left-limit convention: a record time coinciding with an event time
    // gets the pre-event state
    while (rec < record_times.size() && record_times[rec] <= t_next &&
           record_times[rec] <= horizon) {
      path.states.push_back(x);
      ++rec;
    }
    if (t_next > horizon) {
      t = horizon;
      break;
    }
    // pick the reaction type
    double u = rng.uniform() * h0;
    int type = net.reaction_count() - 1;
    double cum = 0.0;
    for (int i = 0; i < net.reaction_count(); ++i) {
      cum += h(i);
      if (u <= cum) {
        type = i;
        break;
      }
    }
    x += net.stoich().col(type);
    t = t_next;
  }
  while (rec < record_times.size()) {
    path.states.push_back(x);
    ++rec;
  }
  return path;
}

LatentPath poisson_leap_path(const ReactionNetwork& net, const Eigen::VectorXd& rates,
                             const Eigen::VectorXd& x0, int n_obs, const DiscretisationGrid& grid,
                             const std::vector<Eigen::VectorXd>& uniforms) {
  const int v = net.reaction_count();
  const int steps = (n_obs - 1) * grid.m;
  if (static_cast<int>(uniforms.size()) != steps)
    throw std::invalid_argument("poisson_leap_path: need one uniform vector per sub-step");
  const double dtau = grid.delta_tau();

  LatentPath path;
  path.times.reserve(steps + 1);
  path.states.reserve(steps + 1);
  path.reaction_counts.reserve(steps);

  Eigen::VectorXd x = x0;
  Eigen::VectorXd h(v), r(v);
  bool clamped = false, invalid = false;
  path.times.push_back(1.0);
  path.states.push_back(x);
  for (int step = 0; step < steps; ++step) {
    hazard_into(net, x, rates, h, clamped, invalid);
    for (int j = 0; j < v; ++j)
      r(j) = static_cast<double>(poisson_quantile(h(j) * dtau, uniforms[step](j)));
    x += net.stoich() * r;
    const int t = step / grid.m;
    const int k = step % grid.m;
    path.times.push_back(grid.tau(1.0 + t, k + 1));
    path.states.push_back(x);
    path.reaction_counts.push_back(r);
  }
  return path;
}

LatentPath cle_euler_path(const KineticModel& model, const Eigen::VectorXd& theta,
                          const Eigen::VectorXd& x0, int n_obs, const DiscretisationGrid& grid,
                          const std::vector<Eigen::VectorXd>& gaussians) {
  const int d = model.latent_dim();
  const int steps = (n_obs - 1) * grid.m;
  if (static_cast<int>(gaussians.size()) != steps)
    throw std::invalid_argument("cle_euler_path: need one gaussian vector per sub-step");
  const double dtau = grid.delta_tau();

  LatentPath path;
  path.times.reserve(steps + 1);
  path.states.reserve(steps + 1);

  Eigen::VectorXd x = x0;
  Eigen::VectorXd h(model.network.reaction_count());
  DriftDiffusion dd;
  dd.drift.resize(d);
  dd.diffusion.resize(d, d);
  path.times.push_back(1.0);
  path.states.push_back(x);
  for (int step = 0; step < steps; ++step) {
    drift_diffusion_into(model, x, theta, h, dd);
    PsdSqrtInfo info;
    const Eigen::MatrixXd root = psd_sqrt(dd.diffusion * dtau, &info);
    if (info.large_clamp)
      throw std::runtime_error("cle_euler_path: diffusion matrix not PSD at step " +
                               std::to_string(step));
    x += dd.drift * dtau + root * gaussians[step];
    const int t = step / grid.m;
    const int k = step % grid.m;
    path.times.push_back(grid.tau(1.0 + t, k + 1));
    path.states.push_back(x);
  }
  return path;
}

Dataset synthesize_data(const LatentPath& path, const ObservationModel& obs, std::uint64_t seed) {
  Rng rng(seed);
  const int p = obs.obs_dim();
  Dataset data;
  data.times = path.times;
  data.y.reserve(path.states.size());
  Eigen::MatrixXd noise_root;
  if (!obs.error_free()) noise_root = psd_sqrt(obs.Sigma);
  for (const Eigen::VectorXd& x : path.states) {
    Eigen::VectorXd y = obs.P.transpose() * x;
    if (!obs.error_free()) y += noise_root * rng.normal_vector(p);
    data.y.push_back(std::move(y));
  }
  return data;
}

}  // namespace skm
