#pragma once

#include <vector>

#include <Eigen/Dense>

namespace skm {

/// Per-parameter prior on a strictly positive rate constant c. Sampling is
/// always done in theta = log c; log_density_log_scale includes the Jacobian
/// for priors specified on the natural scale.
struct Prior {
  enum class Kind { normal_on_log, gamma, exponential };
  Kind kind = Kind::normal_on_log;
  double a = 0.0;  // normal_on_log: mean of log c; gamma: shape; exponential: rate
  double b = 1.0;  // normal_on_log: sd of log c; gamma: rate; unused for exponential

  double log_density_natural(double c) const;
  double log_density_log_scale(double theta) const;
};

struct PriorSet {
  std::vector<Prior> components;

  int size() const { return static_cast<int>(components.size()); }
  double log_density_log_scale(const Eigen::VectorXd& theta) const;
};

}  // namespace skm
