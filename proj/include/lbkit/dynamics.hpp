#pragma once

// Cell-local kernels: equilibria, moments, BGK/TRT relaxation and Guo forcing.
//
// Every kernel works on one cell's populations (a span of q values). Populations
// are stored raw, so the rest state of a cell is f_i = w_i rho.

#include <array>
#include <cmath>
#include <span>

#include "lbkit/descriptor.hpp"
#include "lbkit/error.hpp"

namespace lbkit {

using Populations = std::array<double, kMaxQ>;

struct Moments {
  double rho = 0.0;
  std::array<double, 2> u{0.0, 0.0};
};

struct DynamicsParams {
  double omega = 1.0;
  /// TRT magic parameter.
  double magic = 0.25;

  void validate() const {
    if (!(omega > 0.0 && omega < 2.0)) {
      throw StabilityError("relaxation frequency must lie in (0,2)");
    }
    if (!(magic > 0.0)) {
      throw ValidationError("TRT magic parameter must be positive");
    }
  }
};

/// f_eq_i = w_i rho [1 + c.u/cs2 + (c.u)^2/(2 cs2^2) - u.u/(2 cs2)]
inline void equilibriumSecondOrder(const VelocitySet& v, double rho, std::array<double, 2> u,
                                   std::span<double> feq) {
  const double uu = u[0] * u[0] + u[1] * u[1];
  for (int i = 0; i < v.q; ++i) {
    const double cu = v.cx[i] * u[0] + v.cy[i] * u[1];
    feq[i] = v.w[i] * rho *
             (1.0 + cu * v.invCs2 + 0.5 * cu * cu * v.invCs2 * v.invCs2 - 0.5 * uu * v.invCs2);
  }
}

/// g_eq_i = w_i rho (1 + c.u/cs2)
inline void equilibriumFirstOrder(const VelocitySet& v, double rho, std::array<double, 2> u,
                                  std::span<double> geq) {
  for (int i = 0; i < v.q; ++i) {
    const double cu = v.cx[i] * u[0] + v.cy[i] * u[1];
    geq[i] = v.w[i] * rho * (1.0 + cu * v.invCs2);
  }
}

inline double computeRho(const VelocitySet& v, std::span<const double> f) {
  double rho = 0.0;
  for (int i = 0; i < v.q; ++i) {
    rho += f[i];
  }
  return rho;
}

/// Zeroth and first moments. Throws NumericalBlowup when rho is not positive.
/// With a force density F the momentum is shifted by F/2 before dividing by rho.
inline Moments computeMoments(const VelocitySet& v, std::span<const double> f,
                              const double* force = nullptr) {
  Moments m;
  double jx = 0.0;
  double jy = 0.0;
  for (int i = 0; i < v.q; ++i) {
    m.rho += f[i];
    jx += v.cx[i] * f[i];
    jy += v.cy[i] * f[i];
  }
  if (!(m.rho > 0.0) || !std::isfinite(m.rho)) {
    throw NumericalBlowup("non-positive or non-finite density");
  }
  if (force != nullptr) {
    jx += force[0] / 2.0;
    jy += force[1] / 2.0;
  }
  m.u = {jx / m.rho, jy / m.rho};
  return m;
}

inline void relax(const VelocitySet& v, std::span<double> f, std::span<const double> feq,
                  double omega) {
  for (int i = 0; i < v.q; ++i) {
    f[i] = (1.0 - omega) * f[i] + omega * feq[i];
  }
}

/// BGK towards the second-order equilibrium of the given moments.
inline void collideBGK(const VelocitySet& v, std::span<double> f, const Moments& m, double omega) {
  Populations feq;
  equilibriumSecondOrder(v, m.rho, m.u, feq);
  relax(v, f, std::span<const double>(feq.data(), static_cast<std::size_t>(v.q)), omega);
}

inline Moments collideBGK(const VelocitySet& v, std::span<double> f, double omega) {
  const Moments m = computeMoments(v, f);
  collideBGK(v, f, m, omega);
  return m;
}

/// Antisymmetric rate from (1/omega+ - 1/2)(1/omega- - 1/2) = magic.
inline double trtOmegaMinus(double omega, double magic) {
  const double plus = 1.0 / omega - 0.5;
  return 1.0 / (magic / plus + 0.5);
}

inline void collideTRT(const VelocitySet& v, std::span<double> f, const Moments& m, double omega,
                       double magic) {
  Populations feq;
  equilibriumSecondOrder(v, m.rho, m.u, feq);
  const double omegaMinus = trtOmegaMinus(omega, magic);
  Populations post;
  for (int i = 0; i < v.q; ++i) {
    const int o = v.opposite[i];
    const double fPlus = 0.5 * (f[i] + f[o]);
    const double fMinus = 0.5 * (f[i] - f[o]);
    const double eqPlus = 0.5 * (feq[i] + feq[o]);
    const double eqMinus = 0.5 * (feq[i] - feq[o]);
    post[i] = f[i] - omega * (fPlus - eqPlus) - omegaMinus * (fMinus - eqMinus);
  }
  for (int i = 0; i < v.q; ++i) {
    f[i] = post[i];
  }
}

inline Moments collideTRT(const VelocitySet& v, std::span<double> f, double omega, double magic) {
  const Moments m = computeMoments(v, f);
  collideTRT(v, f, m, omega, magic);
  return m;
}

/// Guo source term S_i = (1 - omega/2) w_i [(c_i - u)/cs2 + (c_i.u)/cs2^2 c_i] . F
inline void guoSource(const VelocitySet& v, std::array<double, 2> u, double omega,
                      std::array<double, 2> force, std::span<double> source) {
  const double prefactor = 1.0 - 0.5 * omega;
  for (int i = 0; i < v.q; ++i) {
    const double cu = v.cx[i] * u[0] + v.cy[i] * u[1];
    const double ax = (v.cx[i] - u[0]) * v.invCs2 + cu * v.invCs2 * v.invCs2 * v.cx[i];
    const double ay = (v.cy[i] - u[1]) * v.invCs2 + cu * v.invCs2 * v.invCs2 * v.cy[i];
    source[i] = prefactor * v.w[i] * (ax * force[0] + ay * force[1]);
  }
}

/// Adds the Guo source; u is the force-shifted velocity used in the collision.
inline void applyGuoForce(const VelocitySet& v, std::span<double> f, std::array<double, 2> u,
                          double omega, std::array<double, 2> force) {
  Populations source;
  guoSource(v, u, omega, force, source);
  for (int i = 0; i < v.q; ++i) {
    f[i] += source[i];
  }
}

/// Velocity shift, BGK with the shifted velocity, then the Guo source.
inline Moments collideForcedBGK(const VelocitySet& v, std::span<double> f, double omega,
                                std::array<double, 2> force) {
  const Moments m = computeMoments(v, f, force.data());
  collideBGK(v, f, m, omega);
  applyGuoForce(v, f, m.u, omega, force);
  return m;
}

/// BGK relaxation of an advection-diffusion cell towards the first-order
/// equilibrium at the given advection velocity. Returns the transported density.
inline double collideAdeBGK(const VelocitySet& v, std::span<double> g, std::array<double, 2> u,
                            double omega) {
  const double rho = computeRho(v, g);
  Populations geq;
  equilibriumFirstOrder(v, rho, u, geq);
  relax(v, g, std::span<const double>(geq.data(), static_cast<std::size_t>(v.q)), omega);
  return rho;
}

} // namespace lbkit
