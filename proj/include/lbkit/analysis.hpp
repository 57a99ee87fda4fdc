#pragma once

// Verification math: analytic reference profiles, error norms, EOC fits,
// windowed convergence tracing, line fluxes and start-up ramps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "lbkit/descriptor.hpp"
#include "lbkit/error.hpp"
#include "lbkit/geometry.hpp"

namespace lbkit {

/// Cell-centered field snapshot with C components stored as planes.
template <int C>
struct GridField {
  static_assert(C == 1 || C == 2);
  static constexpr int components = C;

  int nx = 0;
  int ny = 0;
  Vec2 origin{0.0, 0.0};
  double deltaX = 1.0;
  std::vector<double> data;

  GridField() = default;
  GridField(int nx_, int ny_, Vec2 origin_ = {0.0, 0.0}, double deltaX_ = 1.0)
    : nx(nx_), ny(ny_), origin(origin_), deltaX(deltaX_) {
    if (nx < 1 || ny < 1) {
      throw ValidationError("field needs at least one cell per axis");
    }
    data.assign(static_cast<std::size_t>(C) * cells(), 0.0);
  }

  std::size_t cells() const noexcept {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }
  std::size_t index(int ix, int iy) const noexcept {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(ix);
  }
  double& at(int ix, int iy, int comp = 0) {
    return data[static_cast<std::size_t>(comp) * cells() + index(ix, iy)];
  }
  double at(int ix, int iy, int comp = 0) const {
    return data[static_cast<std::size_t>(comp) * cells() + index(ix, iy)];
  }
  std::array<double, C> value(int ix, int iy) const {
    std::array<double, C> v{};
    for (int k = 0; k < C; ++k) {
      v[static_cast<std::size_t>(k)] = at(ix, iy, k);
    }
    return v;
  }
  Vec2 physPosition(int ix, int iy) const {
    return {origin[0] + deltaX * ix, origin[1] + deltaX * iy};
  }
};

using ScalarField = GridField<1>;
using VectorField = GridField<2>;

using CellMask = std::function<bool(int, int)>;

inline CellMask allCells() {
  return [](int, int) { return true; };
}

// -- analytic references ------------------------------------------------------

/// u(y) = 4 u_max y (H - y) / H^2; zero outside [0, H].
inline double poiseuilleProfile(double y, double maxVelocity, double height) {
  if (y < 0.0 || y > height) {
    return 0.0;
  }
  return 4.0 * maxVelocity * y * (height - y) / (height * height);
}

/// sin(pi (x - u t)) exp(-mu pi^2 t)
inline double adeAnalytic1d(double x, double t, double u, double mu) {
  constexpr double pi = std::numbers::pi;
  return std::sin(pi * (x - u * t)) * std::exp(-mu * pi * pi * t);
}

/// sin(pi (x - u_x t)) sin(pi (y - u_y t)) exp(-2 mu pi^2 t)
inline double adeAnalytic2d(double x, double y, double t, std::array<double, 2> u, double mu) {
  constexpr double pi = std::numbers::pi;
  return std::sin(pi * (x - u[0] * t)) * std::sin(pi * (y - u[1] * t)) *
         std::exp(-2.0 * mu * pi * pi * t);
}

struct PorousPlateProfile {
  double u = 0.0;
  double T = 0.0;
};

/// Steady Couette flow with wall-normal injection between y = 0 (resting,
/// temperature Tc) and y = L (moving at u0, temperature Tc + deltaT).
/// Re = 0 falls back to the linear conduction/Couette limit.
inline PorousPlateProfile porousPlateAnalytic(double y, double L, double Re, double Pr, double u0,
                                              double Tc, double deltaT) {
  const double s = y / L;
  auto shape = [s](double a) {
    if (std::abs(a) < 1e-12) {
      return s;
    }
    return std::expm1(a * s) / std::expm1(a);
  };
  return {u0 * shape(Re), Tc + deltaT * shape(Pr * Re)};
}

// -- error norms --------------------------------------------------------------

enum class NormKind { L1, L2, Linf };

/// Absolute or relative L1 / L2 / Linf error of a field against an analytic
/// evaluator sampled at cell centers, with cell measure deltaX^2.
template <int C>
double errorNorm(const GridField<C>& sim,
                 const std::function<std::array<double, C>(const Vec2&)>& ref, const CellMask& mask,
                 NormKind p, bool relative) {
  double diffAcc = 0.0;
  double refAcc = 0.0;
  std::size_t used = 0;
  for (int iy = 0; iy < sim.ny; ++iy) {
    for (int ix = 0; ix < sim.nx; ++ix) {
      if (!mask(ix, iy)) {
        continue;
      }
      ++used;
      const auto r = ref(sim.physPosition(ix, iy));
      double d2 = 0.0;
      double r2 = 0.0;
      for (int k = 0; k < C; ++k) {
        const double d = sim.at(ix, iy, k) - r[static_cast<std::size_t>(k)];
        d2 += d * d;
        r2 += r[static_cast<std::size_t>(k)] * r[static_cast<std::size_t>(k)];
      }
      switch (p) {
      case NormKind::L1:
        diffAcc += std::sqrt(d2);
        refAcc += std::sqrt(r2);
        break;
      case NormKind::L2:
        diffAcc += d2;
        refAcc += r2;
        break;
      case NormKind::Linf:
        diffAcc = std::max(diffAcc, std::sqrt(d2));
        refAcc = std::max(refAcc, std::sqrt(r2));
        break;
      }
    }
  }
  if (used == 0) {
    throw ValidationError("error norm over an empty mask");
  }
  const double measure = sim.deltaX * sim.deltaX;
  double err = diffAcc;
  double refNorm = refAcc;
  if (p == NormKind::L1) {
    err *= measure;
    refNorm *= measure;
  } else if (p == NormKind::L2) {
    err = std::sqrt(err * measure);
    refNorm = std::sqrt(refNorm * measure);
  }
  if (!relative) {
    return err;
  }
  if (!(refNorm > 0.0)) {
    throw ValidationError("relative error norm with zero reference norm");
  }
  return err / refNorm;
}

inline double errorNorm(const ScalarField& sim, const std::function<double(const Vec2&)>& ref,
                        const CellMask& mask, NormKind p, bool relative) {
  const std::function<std::array<double, 1>(const Vec2&)> wrapped = [&ref](const Vec2& x) {
    return std::array<double, 1>{ref(x)};
  };
  return errorNorm<1>(sim, wrapped, mask, p, relative);
}

struct ErrorNorms {
  double absL1 = 0.0;
  double absL2 = 0.0;
  double absLinf = 0.0;
  double relL1 = 0.0;
  double relL2 = 0.0;
  double relLinf = 0.0;
};

template <int C>
ErrorNorms allErrorNorms(const GridField<C>& sim,
                         const std::function<std::array<double, C>(const Vec2&)>& ref,
                         const CellMask& mask) {
  ErrorNorms e;
  e.absL1 = errorNorm<C>(sim, ref, mask, NormKind::L1, false);
  e.absL2 = errorNorm<C>(sim, ref, mask, NormKind::L2, false);
  e.absLinf = errorNorm<C>(sim, ref, mask, NormKind::Linf, false);
  e.relL1 = errorNorm<C>(sim, ref, mask, NormKind::L1, true);
  e.relL2 = errorNorm<C>(sim, ref, mask, NormKind::L2, true);
  e.relLinf = errorNorm<C>(sim, ref, mask, NormKind::Linf, true);
  return e;
}

// -- EOC ----------------------------------------------------------------------

struct EocResult {
  double slope = 0.0;
  /// EOC between consecutive pairs (i, i+1).
  std::vector<double> pairwise;
};

/// pairs are (h, error). Pairwise EOC_ij = ln(E_i/E_j)/ln(h_i/h_j); the slope is
/// an ordinary least-squares fit of ln E against ln h.
inline EocResult computeEOC(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 2) {
    throw ValidationError("EOC needs at least two (h, error) pairs");
  }
  for (const auto& [h, e] : pairs) {
    if (!(h > 0.0) || !(e > 0.0) || !std::isfinite(h) || !std::isfinite(e)) {
      throw ValidationError("EOC entries must be positive and finite");
    }
  }
  EocResult result;
  for (std::size_t k = 0; k + 1 < pairs.size(); ++k) {
    const auto& [h0, e0] = pairs[k];
    const auto& [h1, e1] = pairs[k + 1];
    if (h0 == h1) {
      throw ValidationError("EOC needs distinct grid spacings");
    }
    result.pairwise.push_back(std::log(e0 / e1) / std::log(h0 / h1));
  }
  const double n = static_cast<double>(pairs.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [h, e] : pairs) {
    mx += std::log(h);
    my += std::log(e);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [h, e] : pairs) {
    const double dx = std::log(h) - mx;
    sxy += dx * (std::log(e) - my);
    sxx += dx * dx;
  }
  result.slope = sxy / sxx;
  return result;
}

// -- convergence --------------------------------------------------------------

/// Keeps the last `windowSize` samples; converged iff the window is full and
/// the population standard deviation is below epsilon * |mean|.
class ValueTracer {
public:
  ValueTracer(std::size_t windowSize, double epsilon) : window_(windowSize), epsilon_(epsilon) {
    if (windowSize < 2) {
      throw ValidationError("value tracer window must hold at least two samples");
    }
    if (!(epsilon > 0.0)) {
      throw ValidationError("value tracer tolerance must be positive");
    }
  }

  void takeValue(double sample) {
    samples_.push_back(sample);
    if (samples_.size() > window_) {
      samples_.pop_front();
    }
  }

  bool full() const noexcept { return samples_.size() == window_; }
  std::size_t windowSize() const noexcept { return window_; }
  double epsilon() const noexcept { return epsilon_; }

  double mean() const {
    double sum = 0.0;
    for (double s : samples_) {
      sum += s;
    }
    return samples_.empty() ? 0.0 : sum / static_cast<double>(samples_.size());
  }

  double stdDev() const {
    if (samples_.empty()) {
      return 0.0;
    }
    const double m = mean();
    double acc = 0.0;
    for (double s : samples_) {
      acc += (s - m) * (s - m);
    }
    return std::sqrt(acc / static_cast<double>(samples_.size()));
  }

  bool hasConverged() const {
    if (!full()) {
      return false;
    }
    return stdDev() < epsilon_ * std::abs(mean()) || stdDev() == 0.0;
  }

  void reset() { samples_.clear(); }

private:
  std::size_t window_;
  double epsilon_;
  std::deque<double> samples_;
};

// -- flux -----------------------------------------------------------------------

struct LineFluxResult {
  double flux = 0.0;
  double length = 0.0;
  std::array<double, 2> flow{0.0, 0.0};
};

/// Samples `count` points starting at cell `origin` along the line tangent to
/// the axis-aligned `normal`; Phi = deltaX * sum f . n over masked points.
inline LineFluxResult lineFlux(const VectorField& field, IntVec2 origin, IntVec2 normal, int count,
                               const CellMask& mask) {
  if ((normal[0] != 0) + (normal[1] != 0) != 1 || std::abs(normal[0]) > 1 ||
      std::abs(normal[1]) > 1) {
    throw ValidationError("flux normal must be axis-aligned");
  }
  if (count < 1) {
    throw ValidationError("flux line needs at least one point");
  }
  const IntVec2 t{normal[1] != 0 ? 1 : 0, normal[0] != 0 ? 1 : 0};
  const int ex = origin[0] + t[0] * (count - 1);
  const int ey = origin[1] + t[1] * (count - 1);
  if (origin[0] < 0 || origin[1] < 0 || ex >= field.nx || ey >= field.ny) {
    throw GeometryError("flux line leaves the grid");
  }
  LineFluxResult r;
  int used = 0;
  for (int k = 0; k < count; ++k) {
    const int ix = origin[0] + t[0] * k;
    const int iy = origin[1] + t[1] * k;
    if (!mask(ix, iy)) {
      continue;
    }
    ++used;
    const double fx = field.at(ix, iy, 0);
    const double fy = field.at(ix, iy, 1);
    r.flow[0] += fx;
    r.flow[1] += fy;
    r.flux += fx * normal[0] + fy * normal[1];
  }
  r.flux *= field.deltaX;
  r.length = used * field.deltaX;
  return r;
}

// -- start-up ramps -------------------------------------------------------------

enum class StartScaleKind { Polynomial, Sinus };

/// Ramp from 0 at step 0 to 1 at step >= rampSteps; C1 at both ends.
inline double startScale(long long step, long long rampSteps, StartScaleKind kind) {
  if (rampSteps < 1) {
    throw ValidationError("start ramp needs at least one step");
  }
  const double s = std::clamp(static_cast<double>(step) / static_cast<double>(rampSteps), 0.0, 1.0);
  if (kind == StartScaleKind::Polynomial) {
    return s * s * (3.0 - 2.0 * s);
  }
  return 0.5 * (1.0 - std::cos(std::numbers::pi * s));
}

} // namespace lbkit
