#include "skm/kinetic_model.hpp"

#include <cmath>
#include <stdexcept>

namespace skm {

Eigen::VectorXd AugmentedSDEModel::base_rates(const Eigen::VectorXd& theta,
                                              double log_rate) const {
  const int v = base.reaction_count();
  Eigen::VectorXd rates(v);
  int src = 0;
  for (int i = 0; i < v; ++i) {
    if (i == diffusing_rate_index)
      rates(i) = std::exp(log_rate);
    else
      rates(i) = theta(src++);
  }
  return rates;
}

AugmentedSDEModel augment_with_ou_rate(const ReactionNetwork& net, int diffusing_rate_index,
                                       double initial_log_rate) {
  if (diffusing_rate_index < 0 || diffusing_rate_index >= net.reaction_count())
    throw std::invalid_argument("augment_with_ou_rate: diffusing rate index out of range");
  return AugmentedSDEModel{net, diffusing_rate_index, initial_log_rate};
}

void KineticModel::validate() const {
  if (initial_state.size() != latent_dim())
    throw std::invalid_argument("KineticModel: initial state has wrong dimension");
}

void drift_diffusion_into(const KineticModel& model, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& theta, Eigen::VectorXd& scratch_h,
                          DriftDiffusion& out) {
  const ReactionNetwork& net = model.network;
  const int s = net.species_count();
  const Eigen::MatrixXd& S = net.stoich();

  if (!model.augmentation) {
    hazard_into(net, x, theta, scratch_h, out.hazard_clamped, out.state_invalid);
    out.drift.noalias() = S * scratch_h;
    out.diffusion.noalias() = S * scratch_h.asDiagonal() * S.transpose();
    return;
  }

  const AugmentedSDEModel& aug = *model.augmentation;
  const double log_rate = x(s);
  const Eigen::VectorXd rates = aug.base_rates(theta, log_rate);
  hazard_into(net, x.head(s), rates, scratch_h, out.hazard_clamped, out.state_invalid);

  const double speed = theta(aug.speed_index());
  const double level_log = std::log(theta(aug.level_index()));
  const double diff = theta(aug.diff_index());

  out.drift.head(s).noalias() = S * scratch_h;
  out.drift(s) = speed * (level_log - log_rate);
  out.diffusion.setZero();
  out.diffusion.topLeftCorner(s, s).noalias() = S * scratch_h.asDiagonal() * S.transpose();
  out.diffusion(s, s) = diff * diff;
}

DriftDiffusion drift_diffusion(const KineticModel& model, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& theta) {
  DriftDiffusion out;
  const int d = model.latent_dim();
  out.drift.resize(d);
  out.diffusion.resize(d, d);
  Eigen::VectorXd h(model.network.reaction_count());
  drift_diffusion_into(model, x, theta, h, out);
  return out;
}

}  // namespace skm
