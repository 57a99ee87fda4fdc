#pragma once

// Boundary kernels. Wet-node kinds (Zou-He, ADE Dirichlet/Neumann/adiabatic)
// rebuild the populations streamed in from outside the domain and then
// collide; bounce-back replaces the collision by reflection.
//
// `normal` always points from the wall into the fluid and is axis-aligned.
// A population is unknown after streaming iff c_i . normal > 0. Whatever the
// periodic stream left in those slots is overwritten here.

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <utility>

#include "lbkit/dynamics.hpp"
#include "lbkit/error.hpp"

namespace lbkit {

enum class BoundaryKind {
  BounceBack,
  ZouHeVelocity,
  ZouHePressure,
  AdeDirichlet,
  AdeNeumann,
  AdeAdiabatic
};

struct BoundarySpec {
  BoundaryKind kind = BoundaryKind::BounceBack;
  int material = 2;
  IntVec2 normal{0, 0};
  /// Wall density (ZouHePressure).
  double rho = 1.0;
  /// Wall velocity (ZouHeVelocity).
  std::array<double, 2> u{0.0, 0.0};
  /// Wall value (AdeDirichlet) or flux (AdeNeumann).
  double value = 0.0;

  void validate() const {
    if (kind == BoundaryKind::BounceBack) {
      return;
    }
    const int nonzero = (normal[0] != 0) + (normal[1] != 0);
    if (nonzero != 1 || std::abs(normal[0]) > 1 || std::abs(normal[1]) > 1) {
      throw ValidationError("wet-node boundary normal must be one of (+-1,0), (0,+-1)");
    }
    if (kind == BoundaryKind::ZouHePressure && !(rho > 0.0)) {
      throw ValidationError("pressure boundary density must be positive");
    }
  }
};

inline void checkAxisNormal(IntVec2 normal) {
  if ((normal[0] != 0) + (normal[1] != 0) != 1 || std::abs(normal[0]) > 1 ||
      std::abs(normal[1]) > 1) {
    throw ValidationError("boundary normal must be axis-aligned and of unit length");
  }
}

/// Full-way bounce-back: f_i <-> f_opposite(i).
inline void applyBounceBack(const VelocitySet& v, std::span<double> f) {
  for (int i = 1; i < v.q; ++i) {
    const int o = v.opposite[i];
    if (i < o) {
      std::swap(f[i], f[o]);
    }
  }
}

namespace detail {

inline int dot(const VelocitySet& v, int i, IntVec2 n) { return v.cx[i] * n[0] + v.cy[i] * n[1]; }

/// Sum over populations parallel to the wall and twice the sum over the ones
/// leaving the fluid towards the wall.
inline double zouHeKnownSum(const VelocitySet& v, std::span<const double> f, IntVec2 n) {
  double sum = 0.0;
  for (int i = 0; i < v.q; ++i) {
    const int cn = dot(v, i, n);
    if (cn == 0) {
      sum += f[i];
    } else if (cn < 0) {
      sum += 2.0 * f[i];
    }
  }
  return sum;
}

/// Non-equilibrium bounce-back of the unknowns plus the transverse correction
/// that makes the tangential momentum exact.
inline void zouHeReconstruct(const VelocitySet& v, std::span<double> f, IntVec2 n, double rho,
                             std::array<double, 2> u) {
  const IntVec2 t{n[1] != 0 ? 1 : 0, n[0] != 0 ? 1 : 0};
  const double un = u[0] * n[0] + u[1] * n[1];
  const double ut = u[0] * t[0] + u[1] * t[1];
  double tangentialSum = 0.0;
  for (int i = 0; i < v.q; ++i) {
    if (dot(v, i, n) == 0) {
      tangentialSum += dot(v, i, t) * f[i];
    }
  }
  for (int i = 0; i < v.q; ++i) {
    if (dot(v, i, n) <= 0) {
      continue;
    }
    const int ct = dot(v, i, t);
    f[i] = f[v.opposite[i]] + 2.0 * v.w[i] * rho * un * v.invCs2 +
           ct * 0.5 * (rho * ut - tangentialSum);
  }
}

inline void requireD2Q9(const VelocitySet& v) {
  if (v.kind != LatticeKind::D2Q9) {
    throw ValidationError("Zou-He boundaries require the D2Q9 lattice");
  }
}

inline int missingNormalIndex(const VelocitySet& v, IntVec2 n) {
  for (int i = 0; i < v.q; ++i) {
    if (v.cx[i] == n[0] && v.cy[i] == n[1]) {
      return i;
    }
  }
  throw ValidationError("no lattice velocity along the boundary normal");
}

} // namespace detail

/// Rebuilds the unknown populations so that the cell carries u_wall and the
/// density implied by the known populations. Returns that density.
inline double zouHeVelocityReconstruct(const VelocitySet& v, std::span<double> f, IntVec2 normal,
                                       std::array<double, 2> uWall) {
  detail::requireD2Q9(v);
  checkAxisNormal(normal);
  const double un = uWall[0] * normal[0] + uWall[1] * normal[1];
  const double denom = 1.0 - un;
  if (std::abs(denom) < 1e-12) {
    throw SingularBoundary("Zou-He velocity boundary with wall-normal velocity 1");
  }
  const double rho = detail::zouHeKnownSum(v, f, normal) / denom;
  detail::zouHeReconstruct(v, f, normal, rho, uWall);
  return rho;
}

/// Rebuilds the unknown populations so that the cell carries rho_wall and zero
/// tangential velocity. Returns the implied wall-normal velocity vector.
inline std::array<double, 2> zouHePressureReconstruct(const VelocitySet& v, std::span<double> f,
                                                      IntVec2 normal, double rhoWall) {
  detail::requireD2Q9(v);
  checkAxisNormal(normal);
  if (!(rhoWall > 0.0) || !std::isfinite(rhoWall)) {
    throw ValidationError("pressure boundary density must be positive and finite");
  }
  const double un = 1.0 - detail::zouHeKnownSum(v, f, normal) / rhoWall;
  const std::array<double, 2> u{un * normal[0], un * normal[1]};
  detail::zouHeReconstruct(v, f, normal, rhoWall, u);
  return u;
}

/// Zou-He velocity node: reconstruct, then a regular BGK collision.
inline void applyZouHeVelocity(const VelocitySet& v, std::span<double> f, IntVec2 normal,
                               std::array<double, 2> uWall, double omega) {
  zouHeVelocityReconstruct(v, f, normal, uWall);
  collideBGK(v, f, omega);
}

inline void applyZouHePressure(const VelocitySet& v, std::span<double> f, IntVec2 normal,
                               double rhoWall, double omega) {
  zouHePressureReconstruct(v, f, normal, rhoWall);
  collideBGK(v, f, omega);
}

/// Sets the single unknown population so that sum_i g_i = value.
inline void adeDirichletReconstruct(const VelocitySet& v, std::span<double> g, IntVec2 normal,
                                    double value) {
  checkAxisNormal(normal);
  const int missing = detail::missingNormalIndex(v, normal);
  double known = 0.0;
  for (int i = 0; i < v.q; ++i) {
    if (i != missing) {
      known += g[i];
    }
  }
  g[missing] = value - known;
}

/// Dirichlet value, then a regular advection-diffusion collision.
inline void applyAdeDirichlet(const VelocitySet& v, std::span<double> g, double value,
                              IntVec2 normal, std::array<double, 2> u, double omega) {
  adeDirichletReconstruct(v, g, normal, value);
  collideAdeBGK(v, g, u, omega);
}

/// First-order one-sided difference: c_wall = dx * flux + c(x_wall + dx n), with
/// the flux taken along the outward normal (-normal).
inline double adeNeumannWallValue(double fluxTimesDeltaX, double neighborValue) {
  return fluxTimesDeltaX + neighborValue;
}

inline void applyAdeNeumann(const VelocitySet& v, std::span<double> g, double fluxTimesDeltaX,
                            IntVec2 normal, double neighborValue, std::array<double, 2> u,
                            double omega) {
  applyAdeDirichlet(v, g, adeNeumannWallValue(fluxTimesDeltaX, neighborValue), normal, u, omega);
}

/// Zero normal flux: the unknown population is copied from its opposite.
inline void adeAdiabaticReconstruct(const VelocitySet& v, std::span<double> g, IntVec2 normal) {
  checkAxisNormal(normal);
  const int missing = detail::missingNormalIndex(v, normal);
  g[missing] = g[v.opposite[missing]];
}

inline void applyAdeAdiabatic(const VelocitySet& v, std::span<double> g, IntVec2 normal,
                              std::array<double, 2> u, double omega) {
  adeAdiabaticReconstruct(v, g, normal);
  collideAdeBGK(v, g, u, omega);
}

} // namespace lbkit
