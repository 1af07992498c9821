#include "skm/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "skm/rng.hpp"

namespace skm {

EssResult ess(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n < 10) throw std::invalid_argument("ess: series must have length >= 10");

  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);
  double gamma0 = 0.0;
  for (double x : series) gamma0 += (x - mean) * (x - mean);
  gamma0 /= static_cast<double>(n);
  if (!(gamma0 > 0.0)) return {0.0, true};

  auto acf = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) acc += (series[i] - mean) * (series[i + lag] - mean);
    return acc / (static_cast<double>(n) * gamma0);
  };

  // Geyer initial positive sequence: sum pair sums while they stay positive
  double tau = 0.0;
  const std::size_t max_pair = n / 2 - 1;
  for (std::size_t j = 0; j <= max_pair; ++j) {
    const double pair = acf(2 * j) + acf(2 * j + 1);
    if (pair <= 0.0) break;
    tau += pair;
  }
  tau = 2.0 * tau - 1.0;
  if (tau < 1.0) tau = 1.0;
  return {static_cast<double>(n) / tau, false};
}

double min_ess(const Eigen::MatrixXd& draws) {
  double result = std::numeric_limits<double>::infinity();
  std::vector<double> col(draws.rows());
  for (Eigen::Index j = 0; j < draws.cols(); ++j) {
    for (Eigen::Index i = 0; i < draws.rows(); ++i) col[i] = draws(i, j);
    result = std::min(result, ess(col).ess);
  }
  return result;
}

ProbeResult probe_sigma2(const KineticModel& model, const Dataset& data,
                         const ObservationModel& obs, const DiscretisationGrid& grid,
                         const Eigen::VectorXd& theta_center, const FilterConfig& config,
                         int replicates, std::uint64_t seed) {
  if (replicates < 30) throw std::invalid_argument("probe_sigma2: need >= 30 replicates");
  const AuxLayout layout = filter_layout(model, obs, grid, config);
  Rng rng(seed);
  std::vector<double> estimates;
  estimates.reserve(replicates);
  int deaths = 0;
  for (int r = 0; r < replicates; ++r) {
    AuxiliaryBlock u(rng.normal_vector(layout.dim()), layout);
    const double lp = run_apf(model, theta_center, data, obs, grid, u, config).log_phat;
    if (std::isfinite(lp))
      estimates.push_back(lp);
    else
      ++deaths;
  }
  ProbeResult out;
  out.deaths = deaths;
  out.replicates = static_cast<int>(estimates.size());
  if (estimates.size() < 2) return out;
  double mean = 0.0;
  for (double x : estimates) mean += x;
  mean /= static_cast<double>(estimates.size());
  double var = 0.0;
  for (double x : estimates) var += (x - mean) * (x - mean);
  out.value = var / static_cast<double>(estimates.size() - 1);
  return out;
}

ProbeResult probe_rho_l(const KineticModel& model, const Dataset& data,
                        const ObservationModel& obs, const DiscretisationGrid& grid,
                        const Eigen::VectorXd& theta_center, const FilterConfig& config,
                        double rho, int replicates, std::uint64_t seed) {
  if (replicates < 100) throw std::invalid_argument("probe_rho_l: need >= 100 replicates");
  const AuxLayout layout = filter_layout(model, obs, grid, config);
  Rng rng(seed);
  std::vector<double> first, second;
  first.reserve(replicates);
  second.reserve(replicates);
  int deaths = 0;
  for (int r = 0; r < replicates; ++r) {
    AuxiliaryBlock u(rng.normal_vector(layout.dim()), layout);
    const AuxiliaryBlock u2 = crank_nicolson_step(u, rho, rng.normal_vector(layout.dim()));
    const double a = run_apf(model, theta_center, data, obs, grid, u, config).log_phat;
    const double b = run_apf(model, theta_center, data, obs, grid, u2, config).log_phat;
    if (std::isfinite(a) && std::isfinite(b)) {
      first.push_back(a);
      second.push_back(b);
    } else {
      ++deaths;
    }
  }
  ProbeResult out;
  out.deaths = deaths;
  out.replicates = static_cast<int>(first.size());
  if (first.size() < 3) return out;
  const auto n = static_cast<double>(first.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    ma += first[i];
    mb += second[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    sab += (first[i] - ma) * (second[i] - mb);
    saa += (first[i] - ma) * (first[i] - ma);
    sbb += (second[i] - mb) * (second[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) {
    // identical estimates (rho = 1 or a deterministic likelihood)
    out.value = (saa == 0.0 && sbb == 0.0) ? 1.0 : 0.0;
    return out;
  }
  out.value = sab / std::sqrt(saa * sbb);
  return out;
}

Recommendation recommend_N(const std::map<int, double>& sigma2_by_N, double rho_l) {
  if (sigma2_by_N.empty()) throw std::invalid_argument("recommend_N: empty probe table");
  Recommendation rec;
  const double denom = 1.0 - rho_l * rho_l;
  rec.target = denom > 0.0 ? 2.16 / denom : std::numeric_limits<double>::infinity();
  for (const auto& [N, sigma2] : sigma2_by_N) {
    if (sigma2 <= rec.target) {
      rec.N = N;
      rec.reachable = true;
      return rec;
    }
  }
  rec.N = sigma2_by_N.rbegin()->first;
  rec.reachable = false;
  return rec;
}

}  // namespace skm
