#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace skm {

/// Fixed layout of the auxiliary-variable vector u driving the particle
/// filter. The dimension depends only on (n, m, N, q, init_dim), never on the
/// data or parameters, so Crank-Nicolson updates keep positional
/// correspondence between successive filter runs.
///
/// Ordering: the t=1 prior block (N * init_dim entries) first; then for each
/// observation time t = 2..n, one resampling scalar followed by the
/// propagation block in particle-major, sub-step-minor order (q entries per
/// sub-step).
class AuxLayout {
 public:
  AuxLayout(int n, int m, int N, int q, int init_dim);

  int n() const { return n_; }
  int m() const { return m_; }
  int particles() const { return N_; }
  int per_step_dim() const { return q_; }
  int init_dim() const { return init_dim_; }
  std::int64_t dim() const { return dim_; }

  std::int64_t init_offset(int particle, int j) const {
    return static_cast<std::int64_t>(particle) * init_dim_ + j;
  }
  std::int64_t resample_offset(int t) const {
    return init_block_ + static_cast<std::int64_t>(t - 2) * stride_t_;
  }
  /// Component j of sub-step k (0-based) of particle i's propagation block
  /// into observation time t (t in 2..n).
  std::int64_t prop_offset(int t, int particle, int k, int j) const {
    return init_block_ + static_cast<std::int64_t>(t - 2) * stride_t_ + 1 +
           (static_cast<std::int64_t>(particle) * m_ + k) * q_ + j;
  }

  struct Coord {
    enum class Kind { init, resample, propagate } kind;
    int t = 0, particle = 0, k = 0, j = 0;
  };
  Coord coord_of(std::int64_t offset) const;
  std::int64_t offset_of(const Coord& c) const;

 private:
  int n_, m_, N_, q_, init_dim_;
  std::int64_t init_block_, stride_t_, dim_;
};

/// The auxiliary-variable vector itself; marginally N(0, I_d) under the
/// sampler's stationary law.
struct AuxiliaryBlock {
  Eigen::VectorXd u;
  AuxLayout layout;

  AuxiliaryBlock(Eigen::VectorXd u_in, AuxLayout layout_in);
};

/// u' = rho * u + sqrt(1 - rho^2) * omega. rho = 0 is an independent refresh
/// (the plain pseudo-marginal case); rho = 1 freezes the randomness.
AuxiliaryBlock crank_nicolson_step(const AuxiliaryBlock& u, double rho,
                                   const Eigen::VectorXd& omega);

}  // namespace skm
