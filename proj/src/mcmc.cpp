#include "skm/mcmc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "skm/rng.hpp"

namespace skm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double acceptance_log_ratio(double cur_log_prior, double cur_log_phat, double prop_log_prior,
                            double prop_log_phat, double log_q_cur_given_prop,
                            double log_q_prop_given_cur) {
  const double prop_total = prop_log_prior + prop_log_phat;
  if (!std::isfinite(prop_total)) return -kInf;
  const double cur_total = cur_log_prior + cur_log_phat;
  if (!std::isfinite(cur_total)) return kInf;  // escape an impossible current state
  return prop_total - cur_total + log_q_cur_given_prop - log_q_prop_given_cur;
}

Eigen::VectorXd rw_propose(const Eigen::VectorXd& log_c, const Eigen::MatrixXd& rw_cov,
                           const Eigen::VectorXd& gaussian_draw) {
  if (rw_cov.rows() != log_c.size() || rw_cov.cols() != log_c.size() ||
      gaussian_draw.size() != log_c.size())
    throw std::invalid_argument("rw_propose: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(rw_cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("rw_propose: rw_cov is not positive definite");
  return log_c + llt.matrixL() * gaussian_draw;
}

ChainResult cpmmh_run(const KineticModel& model, const Dataset& data, const ObservationModel& obs,
                      const DiscretisationGrid& grid, const PriorSet& priors,
                      const ProposalConfig& proposal, const FilterConfig& filter_config,
                      int n_iters, std::uint64_t seed, const Eigen::VectorXd& init_log_c) {
  const int v = model.param_dim();
  if (priors.size() != v) throw std::invalid_argument("cpmmh_run: prior dimension mismatch");
  if (init_log_c.size() != v) throw std::invalid_argument("cpmmh_run: init dimension mismatch");
  if (!(proposal.rho >= 0.0 && proposal.rho <= 1.0))
    throw std::invalid_argument("cpmmh_run: rho must lie in [0,1]");

  Eigen::LLT<Eigen::MatrixXd> llt(proposal.rw_cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("cpmmh_run: rw_cov is not positive definite");
  const Eigen::MatrixXd chol = llt.matrixL();

  const AuxLayout layout = filter_layout(model, obs, grid, filter_config);
  Rng rng(seed);

  // initialisation: fresh u draws until the estimate is finite
  double init_log_prior = priors.log_density_log_scale(init_log_c);
  if (!std::isfinite(init_log_prior))
    throw std::runtime_error("cpmmh_run: initial point outside the prior support");
  Eigen::VectorXd theta = init_log_c.array().exp();

  ChainState state{init_log_c, AuxiliaryBlock(rng.normal_vector(layout.dim()), layout), -kInf,
                   init_log_prior};
  int attempts = 0;
  for (; attempts < 100; ++attempts) {
    if (attempts > 0) state.u = AuxiliaryBlock(rng.normal_vector(layout.dim()), layout);
    state.log_phat = run_apf(model, theta, data, obs, grid, state.u, filter_config).log_phat;
    if (std::isfinite(state.log_phat)) break;
  }
  if (!std::isfinite(state.log_phat))
    throw std::runtime_error(
        "cpmmh_run: likelihood estimate stayed -inf over 100 initialisation attempts");

  ChainResult result;
  result.init_attempts = attempts + 1;
  result.records.reserve(n_iters);
  int accepted_count = 0;

  Eigen::VectorXd prop_draw(v);
  for (int iter = 1; iter <= n_iters; ++iter) {
    // fixed stream order: v proposal normals, d auxiliary normals, 1 uniform
    for (int j = 0; j < v; ++j) prop_draw(j) = rng.normal();
    const Eigen::VectorXd omega = rng.normal_vector(layout.dim());
    const double accept_u = rng.uniform();

    const Eigen::VectorXd prop_log_c = state.log_c + chol * prop_draw;
    const double prop_log_prior = priors.log_density_log_scale(prop_log_c);

    bool accept = false;
    AuxiliaryBlock prop_u = crank_nicolson_step(state.u, proposal.rho, omega);
    double prop_log_phat = -kInf;
    if (std::isfinite(prop_log_prior)) {
      const Eigen::VectorXd prop_theta = prop_log_c.array().exp();
      prop_log_phat =
          run_apf(model, prop_theta, data, obs, grid, prop_u, filter_config).log_phat;
      const double log_ratio =
          acceptance_log_ratio(state.log_prior, state.log_phat, prop_log_prior, prop_log_phat);
      accept = std::log(accept_u) < log_ratio;
    }

    if (accept) {
      state.log_c = prop_log_c;
      state.u = std::move(prop_u);
      state.log_phat = prop_log_phat;
      state.log_prior = prop_log_prior;
      ++accepted_count;
    }
    result.records.push_back({state.log_c, state.log_phat, accept});
  }
  result.acceptance_rate = static_cast<double>(accepted_count) / std::max(1, n_iters);
  return result;
}

Eigen::MatrixXd chain_sample_covariance(const std::vector<ChainRecord>& records) {
  if (records.empty()) throw std::invalid_argument("chain_sample_covariance: empty chain");
  const int v = static_cast<int>(records.front().log_c.size());
  const std::size_t start = records.size() / 2;
  const std::size_t count = records.size() - start;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(v);
  for (std::size_t i = start; i < records.size(); ++i) mean += records[i].log_c;
  mean /= static_cast<double>(count);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(v, v);
  for (std::size_t i = start; i < records.size(); ++i) {
    const Eigen::VectorXd d = records[i].log_c - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(std::max<std::size_t>(1, count - 1));
  cov += 1e-8 * Eigen::MatrixXd::Identity(v, v);
  return cov;
}

ChainResult cpmmh_run_with_pilot(const KineticModel& model, const Dataset& data,
                                 const ObservationModel& obs, const DiscretisationGrid& grid,
                                 const PriorSet& priors, double rho,
                                 const FilterConfig& filter_config, int n_iters,
                                 std::uint64_t seed, const Eigen::VectorXd& init_log_c,
                                 const PilotConfig& pilot, Eigen::MatrixXd* tuned_cov) {
  const int v = model.param_dim();
  const double scale =
      pilot.scale_factor > 0.0 ? pilot.scale_factor : 2.56 * 2.56 / static_cast<double>(v);

  ProposalConfig stage1;
  stage1.rho = rho;
  stage1.rw_cov = (0.01 / static_cast<double>(v)) * Eigen::MatrixXd::Identity(v, v);
  const ChainResult pilot_run =
      cpmmh_run(model, data, obs, grid, priors, stage1, filter_config, pilot.pilot_iters,
                derive_seed(seed, 1), init_log_c);

  ProposalConfig stage2;
  stage2.rho = rho;
  stage2.rw_cov = scale * chain_sample_covariance(pilot_run.records);
  if (tuned_cov) *tuned_cov = stage2.rw_cov;

  const Eigen::VectorXd start = pilot_run.records.back().log_c;
  return cpmmh_run(model, data, obs, grid, priors, stage2, filter_config, n_iters,
                   derive_seed(seed, 2), start);
}

}  // namespace skm
