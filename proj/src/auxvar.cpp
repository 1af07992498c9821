#include "skm/auxvar.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace skm {

AuxLayout::AuxLayout(int n, int m, int N, int q, int init_dim)
    : n_(n), m_(m), N_(N), q_(q), init_dim_(init_dim) {
  if (n < 1 || m < 1 || N < 1 || q < 1 || init_dim < 0)
    throw std::invalid_argument("AuxLayout: n, m, N, q must be >= 1 and init_dim >= 0");
  init_block_ = static_cast<std::int64_t>(N) * init_dim;
  stride_t_ = 1 + static_cast<std::int64_t>(N) * m * q;
  dim_ = init_block_ + static_cast<std::int64_t>(n - 1) * stride_t_;
  if (dim_ > (std::int64_t{1} << 31))
    throw std::invalid_argument("AuxLayout: dimension exceeds addressable size");
}

AuxLayout::Coord AuxLayout::coord_of(std::int64_t offset) const {
  if (offset < 0 || offset >= dim_) throw std::out_of_range("AuxLayout: offset out of range");
  Coord c{};
  if (offset < init_block_) {
    c.kind = Coord::Kind::init;
    c.t = 1;
    c.particle = static_cast<int>(offset / init_dim_);
    c.j = static_cast<int>(offset % init_dim_);
    return c;
  }
  const std::int64_t rel = offset - init_block_;
  c.t = static_cast<int>(rel / stride_t_) + 2;
  const std::int64_t in_block = rel % stride_t_;
  if (in_block == 0) {
    c.kind = Coord::Kind::resample;
    return c;
  }
  const std::int64_t prop = in_block - 1;
  c.kind = Coord::Kind::propagate;
  c.particle = static_cast<int>(prop / (static_cast<std::int64_t>(m_) * q_));
  const std::int64_t within = prop % (static_cast<std::int64_t>(m_) * q_);
  c.k = static_cast<int>(within / q_);
  c.j = static_cast<int>(within % q_);
  return c;
}

std::int64_t AuxLayout::offset_of(const Coord& c) const {
  switch (c.kind) {
    case Coord::Kind::init:
      return init_offset(c.particle, c.j);
    case Coord::Kind::resample:
      return resample_offset(c.t);
    case Coord::Kind::propagate:
      return prop_offset(c.t, c.particle, c.k, c.j);
  }
  throw std::logic_error("AuxLayout: unknown coordinate kind");
}

AuxiliaryBlock::AuxiliaryBlock(Eigen::VectorXd u_in, AuxLayout layout_in)
    : u(std::move(u_in)), layout(layout_in) {
  if (u.size() != layout.dim())
    throw std::invalid_argument("AuxiliaryBlock: vector length does not match layout");
}

AuxiliaryBlock crank_nicolson_step(const AuxiliaryBlock& u, double rho,
                                   const Eigen::VectorXd& omega) {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw std::invalid_argument("crank_nicolson_step: rho must lie in [0,1]");
  if (omega.size() != u.u.size())
    throw std::invalid_argument("crank_nicolson_step: omega has wrong dimension");
  const double w = std::sqrt(1.0 - rho * rho);
  return AuxiliaryBlock(rho * u.u + w * omega, u.layout);
}

}  // namespace skm
