#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "skm/kinetic_model.hpp"
#include "skm/observation.hpp"

namespace skm {

/// Equally spaced sub-interval grid: m steps per unit observation interval.
/// Grid times are always formed by index arithmetic, never by accumulating
/// delta_tau, so they stay exact over n*m steps.
struct DiscretisationGrid {
  int m = 1;

  explicit DiscretisationGrid(int m_in) : m(m_in) {
    if (m < 1) throw std::invalid_argument("DiscretisationGrid: m must be >= 1");
  }
  double delta_tau() const { return 1.0 / m; }
  /// Time of sub-step k within the interval starting at observation time t.
  double tau(double interval_start, int k) const {
    return interval_start + static_cast<double>(k) / m;
  }
};

/// A latent trajectory recorded at explicit times; Poisson-leap runs also
/// carry the per-step reaction count vectors.
struct LatentPath {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> reaction_counts;  // empty unless Poisson leap
};

struct Dataset {
  std::vector<double> times;  // observation times 1..n
  std::vector<Eigen::VectorXd> y;
  std::string provenance;  // free-form JSON string (generator, seed, true rates)

  int size() const { return static_cast<int>(times.size()); }
};

/// Gillespie's direct method. Records the left-limit state at each requested
/// time; when the total hazard hits zero the absorbed state fills the rest.
LatentPath gillespie_simulate(const ReactionNetwork& net, const Eigen::VectorXd& rates,
                              const Eigen::VectorXd& x0, double horizon,
                              const std::vector<double>& record_times, std::uint64_t seed);

/// Poisson-leap path over [1, n]: per sub-interval, reaction counts are drawn
/// by inverse-CDF on the supplied uniforms (one per reaction per sub-step),
/// then x <- x + S r. Deterministic in its inputs; negative states are
/// produced faithfully (callers decide how to treat them).
LatentPath poisson_leap_path(const ReactionNetwork& net, const Eigen::VectorXd& rates,
                             const Eigen::VectorXd& x0, int n_obs, const DiscretisationGrid& grid,
                             const std::vector<Eigen::VectorXd>& uniforms);

/// Euler-Maruyama CLE path over [1, n] driven by the supplied standard-normal
/// vectors (one latent_dim vector per sub-step). Deterministic in its inputs.
LatentPath cle_euler_path(const KineticModel& model, const Eigen::VectorXd& theta,
                          const Eigen::VectorXd& x0, int n_obs, const DiscretisationGrid& grid,
                          const std::vector<Eigen::VectorXd>& gaussians);

/// y_t = P^T x_t + N(0, Sigma) at every path time (Sigma = 0 copies exactly).
Dataset synthesize_data(const LatentPath& path, const ObservationModel& obs, std::uint64_t seed);

}  // namespace skm
