#pragma once

#include <string>
#include <vector>

#include "skm/model_io.hpp"

namespace skm {

/// Names accepted by load_builtin.
std::vector<std::string> builtin_names();

/// Fully specified built-in inference problems:
///  - immigration-death: error-free observation, CLE, N(0,10^2) log-rate priors
///  - lotka-volterra: Gaussian noise (sd configurable via sigma), CLE
///  - autoregulatory: error-free observation of the second species, Poisson leap
///  - sir-ou: boarding-school influenza data, OU-modulated infection rate, CLE
/// sigma >= 0 overrides the observation noise sd where the model admits it.
ModelBundle load_builtin(const std::string& name, double sigma = -1.0);

/// Synthetic dataset for a builtin: exact (Gillespie) simulation of the jump
/// process recorded at the observation times, then the observation model
/// applied. Builtins with fixed real data return that data.
Dataset builtin_dataset(const ModelBundle& bundle, std::uint64_t seed);

}  // namespace skm
