#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "skm/auxvar.hpp"
#include "skm/bridges.hpp"
#include "skm/forward_sim.hpp"
#include "skm/kinetic_model.hpp"
#include "skm/observation.hpp"

namespace skm {

enum class Approximation { cle, poisson_leap };
enum class ProposalKind { bridge, bootstrap };

struct FilterConfig {
  int num_particles = 1;
  Approximation approximation = Approximation::cle;
  ProposalKind proposal = ProposalKind::bridge;
  PsiVariant psi_variant = PsiVariant::correction_dtau;
  bool resample = true;   // Algorithm resamples at every step; toggle for experiments
  int threads = 1;        // propagation parallelism; results are schedule-independent
  bool record_terminal_states = false;
  std::ostream* genealogy_out = nullptr;  // debug: JSON lines (t, particle, ancestor, log weight)
};

/// Weighted particle set over one inter-observation interval.
struct ParticleCloud {
  Eigen::MatrixXd states;              // latent_dim x N terminal states
  Eigen::VectorXd log_weights_unnorm;  // length N
  Eigen::VectorXd weights_norm;        // length N, sums to 1 while alive
  std::vector<int> ancestors;          // indices into the previous cloud
};

struct LikelihoodEstimate {
  double log_phat = 0.0;
  std::vector<double> step_increments;  // log p(y_t | y_{1:t-1}) estimates
  bool alive = true;
  std::vector<Eigen::MatrixXd> terminal_states;  // per t when recorded
};

/// Systematic resampling driven by one uniform: ancestor i is the smallest k
/// whose cumulative weight reaches (i + base_uniform) / N.
std::vector<int> systematic_resample(const Eigen::VectorXd& weights_norm, double base_uniform);

/// Greedy nearest-neighbour ordering: start at the particle with the smallest
/// first component, repeatedly append the unvisited particle closest in
/// Euclidean distance. Ties break toward the lower original index.
std::vector<int> euclidean_sort(const Eigen::MatrixXd& states);

/// Auxiliary particle filter over the dataset. A deterministic function of
/// (theta, u): every random input is read from the auxiliary block, so equal
/// inputs give bitwise equal estimates regardless of thread count.
LikelihoodEstimate run_apf(const KineticModel& model, const Eigen::VectorXd& theta,
                           const Dataset& data, const ObservationModel& obs,
                           const DiscretisationGrid& grid, const AuxiliaryBlock& u,
                           const FilterConfig& config);

/// Per-step randomness dimension of the filter under an approximation.
int aux_per_step_dim(const KineticModel& model, Approximation approx);

/// The layout run_apf expects for a dataset of n observations.
AuxLayout filter_layout(const KineticModel& model, const ObservationModel& obs,
                        const DiscretisationGrid& grid, const FilterConfig& config);

}  // namespace skm
