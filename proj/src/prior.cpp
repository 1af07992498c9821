#include "skm/prior.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace skm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double Prior::log_density_natural(double c) const {
  switch (kind) {
    case Kind::normal_on_log: {
      if (!(c > 0.0)) return -kInf;
      const double t = std::log(c);
      const double z = (t - a) / b;
      // includes d(log c)/dc = 1/c
      return -0.5 * z * z - std::log(b) - 0.5 * std::log(2.0 * M_PI) - t;
    }
    case Kind::gamma:
      if (!(c > 0.0)) return -kInf;
      return a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(c) - b * c;
    case Kind::exponential:
      if (!(c > 0.0)) return -kInf;
      return std::log(a) - a * c;
  }
  throw std::logic_error("Prior: unknown kind");
}

double Prior::log_density_log_scale(double theta) const {
  if (!std::isfinite(theta)) return -kInf;
  switch (kind) {
    case Kind::normal_on_log: {
      const double z = (theta - a) / b;
      return -0.5 * z * z - std::log(b) - 0.5 * std::log(2.0 * M_PI);
    }
    case Kind::gamma:
      return a * std::log(b) - std::lgamma(a) + a * theta - b * std::exp(theta);
    case Kind::exponential:
      return std::log(a) + theta - a * std::exp(theta);
  }
  throw std::logic_error("Prior: unknown kind");
}

double PriorSet::log_density_log_scale(const Eigen::VectorXd& theta) const {
  if (theta.size() != size()) throw std::invalid_argument("PriorSet: dimension mismatch");
  double total = 0.0;
  for (int i = 0; i < size(); ++i) {
    total += components[i].log_density_log_scale(theta(i));
    if (!std::isfinite(total)) return -kInf;
  }
  return total;
}

}  // namespace skm
