#pragma once

// Physical <-> lattice unit conversion under diffusive scaling.
//
// The discretization is fixed by the resolution N (cells per characteristic
// length) and the lattice relaxation time tau:
//   dx      = L / N
//   nu_L    = cs2 (tau - 1/2),  cs2 = 1/3
//   dt      = nu_L dx^2 / nu
//   u_L     = U dt / dx

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "lbkit/error.hpp"

namespace lbkit {

class UnitConverter {
public:
  static constexpr double kCs2 = 1.0 / 3.0;

  UnitConverter(int resolution, double latticeRelaxationTime, double charPhysLength,
                double charPhysVelocity, double physViscosity, double physDensity)
    : resolution_(resolution), tau_(latticeRelaxationTime), charPhysLength_(charPhysLength),
      charPhysVelocity_(charPhysVelocity), physViscosity_(physViscosity),
      physDensity_(physDensity) {
    if (resolution < 1) {
      throw ValidationError("resolution must be >= 1, got " + std::to_string(resolution));
    }
    if (!(latticeRelaxationTime > 0.5)) {
      throw StabilityError("lattice relaxation time must exceed 0.5, got " +
                           std::to_string(latticeRelaxationTime));
    }
    if (!(charPhysLength > 0) || !(charPhysVelocity > 0) || !(physViscosity > 0) ||
        !(physDensity > 0)) {
      throw ValidationError("characteristic length, velocity, viscosity and density must be "
                            "positive");
    }
    deltaX_ = charPhysLength_ / resolution_;
    latticeViscosity_ = kCs2 * (tau_ - 0.5);
    deltaT_ = latticeViscosity_ * deltaX_ * deltaX_ / physViscosity_;
    charLatticeVelocity_ = charPhysVelocity_ * deltaT_ / deltaX_;
  }

  int getResolution() const noexcept { return resolution_; }
  double getLatticeRelaxationTime() const noexcept { return tau_; }
  double getCharPhysLength() const noexcept { return charPhysLength_; }
  double getCharPhysVelocity() const noexcept { return charPhysVelocity_; }
  double getPhysViscosity() const noexcept { return physViscosity_; }
  double getPhysDensity() const noexcept { return physDensity_; }
  double getPhysDeltaX() const noexcept { return deltaX_; }
  double getPhysDeltaT() const noexcept { return deltaT_; }
  double getLatticeViscosity() const noexcept { return latticeViscosity_; }
  double getOmega() const noexcept { return 1.0 / tau_; }
  double getCharLatticeVelocity() const noexcept { return charLatticeVelocity_; }
  double getReynoldsNumber() const noexcept {
    return charPhysVelocity_ * charPhysLength_ / physViscosity_;
  }

  /// Nearest whole step, ties rounding up.
  std::int64_t getLatticeTime(double physTime) const {
    if (!(physTime >= 0)) {
      throw ValidationError("physical time must be non-negative");
    }
    return static_cast<std::int64_t>(std::floor(physTime / deltaT_ + 0.5));
  }
  double getPhysTime(std::int64_t steps) const noexcept {
    return static_cast<double>(steps) * deltaT_;
  }

  double getLatticeLength(double physLength) const noexcept { return physLength / deltaX_; }
  double getPhysLength(double latticeLength) const noexcept { return latticeLength * deltaX_; }

  double getLatticeVelocity(double physVelocity) const noexcept {
    return physVelocity * deltaT_ / deltaX_;
  }
  double getPhysVelocity(double latticeVelocity) const noexcept {
    return latticeVelocity * deltaX_ / deltaT_;
  }

  double getPhysDensity(double latticeDensity) const noexcept {
    return latticeDensity * physDensity_;
  }
  double getLatticeDensity(double physDensity) const noexcept {
    return physDensity / physDensity_;
  }

  /// p = (rho_L - 1) cs2 scaled by rho_phys dx^2 / dt^2.
  double getPhysPressure(double latticeDensity) const {
    if (!(latticeDensity > 0)) {
      throw ValidationError("lattice density must be positive");
    }
    return (latticeDensity - 1.0) * kCs2 * pressureScale();
  }
  double getLatticeDensityFromPhysPressure(double physPressure) const noexcept {
    return 1.0 + physPressure / (kCs2 * pressureScale());
  }

  /// Lattice force density (per cell volume) for a physical acceleration.
  double getLatticeForce(double physAcceleration) const noexcept {
    return physAcceleration * deltaT_ * deltaT_ / deltaX_;
  }

  void print(std::ostream& os) const {
    const auto old = os.precision(12);
    os << "Resolution = " << resolution_ << '\n'
       << "LatticeRelaxationTime = " << tau_ << '\n'
       << "CharPhysLength = " << charPhysLength_ << '\n'
       << "CharPhysVelocity = " << charPhysVelocity_ << '\n'
       << "PhysViscosity = " << physViscosity_ << '\n'
       << "PhysDensity = " << physDensity_ << '\n'
       << "DeltaX = " << deltaX_ << '\n'
       << "DeltaT = " << deltaT_ << '\n'
       << "Omega = " << getOmega() << '\n'
       << "CharLatticeVelocity = " << charLatticeVelocity_ << '\n';
    os.precision(old);
  }

  std::string summary() const {
    std::ostringstream os;
    print(os);
    return os.str();
  }

private:
  double pressureScale() const noexcept {
    return physDensity_ * deltaX_ * deltaX_ / (deltaT_ * deltaT_);
  }

  int resolution_;
  double tau_;
  double charPhysLength_;
  double charPhysVelocity_;
  double physViscosity_;
  double physDensity_;
  double deltaX_ = 0;
  double deltaT_ = 0;
  double latticeViscosity_ = 0;
  double charLatticeVelocity_ = 0;
};

inline UnitConverter makeConverterFromResolutionAndRelaxationTime(int resolution, double tau,
                                                                  double charPhysLength,
                                                                  double charPhysVelocity,
                                                                  double physViscosity,
                                                                  double physDensity) {
  return UnitConverter(resolution, tau, charPhysLength, charPhysVelocity, physViscosity,
                       physDensity);
}

/// Adds a diffusivity on top of a flow converter's dx/dt.
class AdeUnitConverter {
public:
  AdeUnitConverter(UnitConverter base, double physDiffusivity, double cs2)
    : base_(std::move(base)), physDiffusivity_(physDiffusivity), cs2_(cs2) {
    if (!(physDiffusivity > 0)) {
      throw ValidationError("physical diffusivity must be positive");
    }
    if (!(cs2 > 0)) {
      throw ValidationError("lattice sound speed squared must be positive");
    }
    const double dx = base_.getPhysDeltaX();
    latticeDiffusivity_ = physDiffusivity_ * base_.getPhysDeltaT() / (dx * dx);
    omega_ = 1.0 / (latticeDiffusivity_ / cs2_ + 0.5);
    if (!(omega_ > 0.0 && omega_ < 2.0)) {
      throw StabilityError("advection-diffusion relaxation frequency " + std::to_string(omega_) +
                           " outside (0,2)");
    }
  }

  const UnitConverter& base() const noexcept { return base_; }
  double getPhysDiffusivity() const noexcept { return physDiffusivity_; }
  double getLatticeDiffusivity() const noexcept { return latticeDiffusivity_; }
  double getOmega() const noexcept { return omega_; }
  double getLatticeRelaxationTime() const noexcept { return 1.0 / omega_; }

private:
  UnitConverter base_;
  double physDiffusivity_;
  double cs2_;
  double latticeDiffusivity_ = 0;
  double omega_ = 0;
};

inline AdeUnitConverter makeAdeConverter(const UnitConverter& base, double physDiffusivity,
                                         double cs2) {
  return AdeUnitConverter(base, physDiffusivity, cs2);
}

} // namespace lbkit
