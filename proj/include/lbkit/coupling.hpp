#pragma once

// Flow <-> advection-diffusion coupling: velocity transfer and Boussinesq force.
// Drivers run: flow step, couple, ADE step.

#include <array>
#include <cmath>

#include "lbkit/error.hpp"
#include "lbkit/lattice.hpp"

namespace lbkit {

struct BoussinesqParams {
  double gravity = 0.0;
  double T0 = 0.0;
  double deltaT = 1.0;
  std::array<double, 2> direction{0.0, 1.0};

  void validate() const {
    if (deltaT == 0.0 || !std::isfinite(deltaT)) {
      throw ValidationError("Boussinesq temperature difference must be nonzero");
    }
    const double norm = std::hypot(direction[0], direction[1]);
    if (std::abs(norm - 1.0) > 1e-12) {
      throw ValidationError("Boussinesq direction must be a unit vector");
    }
  }
};

namespace detail {

inline void requireSameShape(const BlockLattice& a, const BlockLattice& b) {
  if (a.nx() != b.nx() || a.ny() != b.ny()) {
    throw ValidationError("coupled lattices must have the same grid shape");
  }
}

inline bool isFlowBulk(DynamicsTag tag) {
  return tag == DynamicsTag::BGK || tag == DynamicsTag::ForcedBGK || tag == DynamicsTag::TRT;
}

} // namespace detail

/// Writes the flow velocity into the ADE lattice's VELOCITY field. Bulk flow
/// cells give their (force-shifted) moment velocity, velocity-boundary cells
/// their prescribed wall velocity; all other cells are left untouched.
inline void coupleVelocity(const BlockLattice& nse, BlockLattice& ade) {
  detail::requireSameShape(nse, ade);
  auto ux = ade.field(FieldKind::Velocity, 0);
  auto uy = ade.field(FieldKind::Velocity, 1);
  for (int iy = 0; iy < nse.ny(); ++iy) {
    for (int ix = 0; ix < nse.nx(); ++ix) {
      const DynamicsTag tag = nse.tag(ix, iy);
      std::array<double, 2> u{};
      if (detail::isFlowBulk(tag)) {
        u = nse.moments(ix, iy).u;
      } else if (tag == DynamicsTag::ZouHeVelocity) {
        u = nse.boundary(ix, iy).u;
      } else {
        continue;
      }
      const std::size_t c = nse.cellIndex(ix, iy);
      ux[c] = u[0];
      uy[c] = u[1];
    }
  }
}

/// FORCE = g * direction * rho (T - T0) / deltaT on bulk flow cells.
inline void coupleBoussinesq(BlockLattice& nse, const BlockLattice& ade,
                             const BoussinesqParams& params) {
  detail::requireSameShape(nse, ade);
  params.validate();
  auto fx = nse.field(FieldKind::Force, 0);
  auto fy = nse.field(FieldKind::Force, 1);
  for (int iy = 0; iy < nse.ny(); ++iy) {
    for (int ix = 0; ix < nse.nx(); ++ix) {
      if (!detail::isFlowBulk(nse.tag(ix, iy))) {
        continue;
      }
      const double T = ade.density(ix, iy);
      const double rho = nse.density(ix, iy);
      const double scale = params.gravity * rho * (T - params.T0) / params.deltaT;
      const std::size_t c = nse.cellIndex(ix, iy);
      fx[c] = scale * params.direction[0];
      fy[c] = scale * params.direction[1];
    }
  }
}

} // namespace lbkit
