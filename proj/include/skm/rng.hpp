#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "skm/math_utils.hpp"

namespace skm {

/// Deterministic random stream. Normals are produced by inverting the
/// standard normal CDF on 53-bit uniforms so the stream is reproducible
/// independent of the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw strictly inside (0,1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double normal() { return norm_quantile(uniform()); }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal();
    return z;
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a base seed and a role tag,
/// so pilot/main/data streams never overlap.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace skm
