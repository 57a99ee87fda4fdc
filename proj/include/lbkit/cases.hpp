#pragma once

// Benchmark cases wiring geometry, units, lattices, boundaries, coupling,
// analysis, output and the optimizer together. Every case reads its parameters
// from a ConfigTree (missing keys fall back to the defaults below with a
// warning) and returns a CaseReport.
//
// Material numbers: 0 exterior, 1 fluid, 2 wall, 3 inlet / lid / lower plate,
// 4 outlet / upper plate.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lbkit/analysis.hpp"
#include "lbkit/boundary.hpp"
#include "lbkit/coupling.hpp"
#include "lbkit/error.hpp"
#include "lbkit/geometry.hpp"
#include "lbkit/io.hpp"
#include "lbkit/lattice.hpp"
#include "lbkit/log.hpp"
#include "lbkit/optimize.hpp"
#include "lbkit/units.hpp"

namespace lbkit {

struct CaseConfig {
  ConfigTree tree;
  std::string outputDir = "tmp";
  bool writeOutput = true;
};

struct CaseReport {
  std::string caseName;
  /// Per-resolution table.
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::optional<EocResult> eoc;
  /// Column the EOC is fitted on; empty for cases without a resolution study.
  std::string eocColumn;
  std::map<std::string, double> metrics;
  bool converged = false;
  long long convergenceStep = -1;
  double wallClockSeconds = 0.0;
  std::vector<std::string> files;
  std::vector<TraceEntry> trace;
  Control control;
  std::string optimizerStatus;

  double metric(const std::string& name) const {
    const auto it = metrics.find(name);
    if (it == metrics.end()) {
      throw ValidationError("report of " + caseName + " has no metric '" + name + "'");
    }
    return it->second;
  }

  double column(std::size_t row, const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end() || row >= rows.size()) {
      throw ValidationError("report of " + caseName + " has no column '" + name + "'");
    }
    return rows[row][static_cast<std::size_t>(it - columns.begin())];
  }
};

namespace detail {

/// Per-case output directory and file manifest.
class OutputSink {
public:
  OutputSink(const CaseConfig& cfg, const std::string& caseName, std::vector<std::string>& files)
    : enabled_(cfg.writeOutput), files_(&files) {
    if (enabled_) {
      dir_ = std::filesystem::path(cfg.outputDir) / caseName;
      std::error_code ec;
      std::filesystem::create_directories(dir_, ec);
      if (ec) {
        throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
      }
    }
  }

  bool enabled() const noexcept { return enabled_; }

  std::string path(const std::string& name) {
    const std::string p = (dir_ / name).string();
    files_->push_back(p);
    return p;
  }

private:
  bool enabled_;
  std::filesystem::path dir_;
  std::vector<std::string>* files_;
};

inline std::vector<int> parseIntList(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) {
      continue;
    }
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size()) {
      throw ValidationError("'" + t + "' is not an integer");
    }
    out.push_back(v);
  }
  return out;
}

inline std::vector<double> parseDoubleList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (t.empty() || used != t.size()) {
      throw ValidationError("'" + t + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

/// Resolution list: Resolutions if present, else the single Resolution.
inline std::vector<int> resolutions(const ConfigTree& tree, const std::string& fallbackList) {
  std::vector<int> res;
  if (tree.contains("Application.Discretization.Resolutions")) {
    res = parseIntList(*tree.raw("Application.Discretization.Resolutions"));
  } else if (tree.contains("Application.Discretization.Resolution")) {
    res = {static_cast<int>(tree.getInt("Application.Discretization.Resolution", 0))};
  } else {
    res = parseIntList(fallbackList);
  }
  if (res.empty()) {
    throw ValidationError("no resolution given");
  }
  for (std::size_t k = 0; k < res.size(); ++k) {
    if (res[k] < 2) {
      throw ValidationError("resolutions must be at least 2");
    }
    if (k > 0 && res[k] <= res[k - 1]) {
      throw ValidationError("resolutions must be strictly increasing");
    }
  }
  return res;
}

inline void stepChecked(BlockLattice& lattice, const DynamicsParams& params, long long step) {
  try {
    collideAndStream(lattice, params);
  } catch (const NumericalBlowup& e) {
    throw NumericalBlowup(std::string(e.what()) + " at step " + std::to_string(step),
                          static_cast<std::size_t>(step));
  }
}

inline void warnLatticeVelocity(const Logger& log, double uLattice) {
  if (std::abs(uLattice) > 0.4) {
    log.warn("lattice velocity ", uLattice, " exceeds 0.4; expect compressibility errors");
  }
}

inline long long positiveSteps(const UnitConverter& conv, double physTime) {
  return std::max<long long>(1, conv.getLatticeTime(physTime));
}

/// Physical velocity / density snapshot of a flow lattice.
struct FlowSnapshot {
  VectorField velocity;
  ScalarField density;
  ScalarField speed;
};

inline FlowSnapshot snapshotFlow(const BlockLattice& lattice, const Geometry& geo,
                                 const UnitConverter& conv) {
  FlowSnapshot s{VectorField(lattice.nx(), lattice.ny(), geo.origin(), geo.deltaX()),
                 ScalarField(lattice.nx(), lattice.ny(), geo.origin(), geo.deltaX()),
                 ScalarField(lattice.nx(), lattice.ny(), geo.origin(), geo.deltaX())};
  for (int iy = 0; iy < lattice.ny(); ++iy) {
    for (int ix = 0; ix < lattice.nx(); ++ix) {
      const DynamicsTag tag = lattice.tag(ix, iy);
      if (tag == DynamicsTag::NoDynamics || tag == DynamicsTag::BounceBack) {
        s.density.at(ix, iy) = conv.getPhysDensity(1.0);
        continue;
      }
      const Moments m = lattice.moments(ix, iy);
      const double ux = conv.getPhysVelocity(m.u[0]);
      const double uy = conv.getPhysVelocity(m.u[1]);
      s.velocity.at(ix, iy, 0) = ux;
      s.velocity.at(ix, iy, 1) = uy;
      s.density.at(ix, iy) = conv.getPhysDensity(m.rho);
      s.speed.at(ix, iy) = std::hypot(ux, uy);
    }
  }
  return s;
}

/// Mean kinetic energy 0.5 |u|^2 (lattice units) over the masked cells.
inline double averageEnergy(const BlockLattice& lattice, const MaterialIndicator& mask) {
  double sum = 0.0;
  std::size_t n = 0;
  for (int iy = 0; iy < lattice.ny(); ++iy) {
    for (int ix = 0; ix < lattice.nx(); ++ix) {
      if (!mask(ix, iy)) {
        continue;
      }
      const Moments m = lattice.moments(ix, iy);
      sum += 0.5 * (m.u[0] * m.u[0] + m.u[1] * m.u[1]);
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

inline double maxSpeed(const BlockLattice& lattice, const MaterialIndicator& mask) {
  double best = 0.0;
  for (int iy = 0; iy < lattice.ny(); ++iy) {
    for (int ix = 0; ix < lattice.nx(); ++ix) {
      if (mask(ix, iy)) {
        const Moments m = lattice.moments(ix, iy);
        best = std::max(best, std::hypot(m.u[0], m.u[1]));
      }
    }
  }
  return best;
}

inline void dumpFlow(OutputSink& sink, const std::string& name, long long step,
                     const FlowSnapshot& s) {
  if (!sink.enabled()) {
    return;
  }
  writeVTI(sink.path(vtiFileName(name, step)), vtiGridOf(s.velocity),
           {toVtiArray("velocity", s.velocity), toVtiArray("density", s.density)});
}

/// Relative errors that stay defined when the reference vanishes: a zero
/// reference with zero error gives 0.
template <int C>
ErrorNorms safeErrorNorms(const GridField<C>& sim,
                          const std::function<std::array<double, C>(const Vec2&)>& ref,
                          const CellMask& mask) {
  ErrorNorms e;
  e.absL1 = errorNorm<C>(sim, ref, mask, NormKind::L1, false);
  e.absL2 = errorNorm<C>(sim, ref, mask, NormKind::L2, false);
  e.absLinf = errorNorm<C>(sim, ref, mask, NormKind::Linf, false);
  auto rel = [&](NormKind p, double abs) {
    try {
      return errorNorm<C>(sim, ref, mask, p, true);
    } catch (const ValidationError&) {
      return abs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
  };
  e.relL1 = rel(NormKind::L1, e.absL1);
  e.relL2 = rel(NormKind::L2, e.absL2);
  e.relLinf = rel(NormKind::Linf, e.absLinf);
  return e;
}

inline void finishTable(CaseReport& report, OutputSink& sink, const std::string& csvName) {
  if (sink.enabled()) {
    writeCSV(sink.path(csvName), report.columns, report.rows);
  }
}

inline double elapsedSeconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace detail

// -- poiseuille2d ----------------------------------------------------------------

enum class PoiseuilleMode { ForceDriven, InletOutlet };

inline PoiseuilleMode poiseuilleModeFromString(const std::string& s) {
  if (s == "ForceDriven") {
    return PoiseuilleMode::ForceDriven;
  }
  if (s == "InletOutlet") {
    return PoiseuilleMode::InletOutlet;
  }
  throw ValidationError("unknown Poiseuille mode '" + s + "' (ForceDriven, InletOutlet)");
}

/// Channel of height H = CharPhysLength between two bounce-back walls.
struct PoiseuilleSetup {
  PoiseuilleMode mode = PoiseuilleMode::ForceDriven;
  int resolution = 51;
  double tau = 0.8;
  double height = 1.0;
  double length = 2.0;
  double charVelocity = 1.0;
  double viscosity = 0.1;
  double density = 1.0;
  /// Multiplies the driving (force or inlet profile).
  double driveScale = 1.0;
  double maxPhysTime = 40.0;
  double startUpTime = 2.0;
  double interval = 1.0;
  double residuum = 1e-5;
  /// Stop once the energy tracer converges.
  bool stopOnConvergence = true;
  double saveTime = 5.0;

  static PoiseuilleSetup fromConfig(const ConfigTree& t) {
    PoiseuilleSetup s;
    s.mode = poiseuilleModeFromString(t.getString("Application.Mode", "ForceDriven"));
    s.tau = t.getDouble("Application.Discretization.LatticeRelaxationTime", 0.8);
    s.height = t.getDouble("Application.PhysParameters.CharPhysLength", 1.0);
    s.length = t.getDouble("Application.PhysParameters.ChannelLength", 2.0 * s.height);
    s.charVelocity = t.getDouble("Application.PhysParameters.CharPhysVelocity", 1.0);
    s.viscosity = t.getDouble("Application.PhysParameters.PhysViscosity", 0.1);
    s.density = t.getDouble("Application.PhysParameters.PhysDensity", 1.0);
    s.driveScale = t.getDouble("Application.PhysParameters.DriveScale", 1.0);
    s.maxPhysTime = t.getDouble("Application.PhysParameters.PhysMaxTime", 40.0);
    s.startUpTime = t.getDouble("Application.PhysParameters.StartUpTime", 2.0);
    s.interval = t.getDouble("Application.ConvergenceCheck.Interval", 1.0);
    s.residuum = t.getDouble("Application.ConvergenceCheck.Residuum", 1e-5);
    s.stopOnConvergence = t.getBool("Application.ConvergenceCheck.StopOnConvergence", true);
    s.saveTime = t.getDouble("Output.VtkOutput.SaveTime", 5.0);
    return s;
  }
};

struct PoiseuilleRun {
  UnitConverter converter;
  Geometry geometry;
  BlockLattice lattice;
  long long steps = 0;
  bool converged = false;
  ErrorNorms errors;
};

namespace detail {

inline Geometry poiseuilleGeometry(const PoiseuilleSetup& s, const UnitConverter& conv) {
  const double dx = conv.getPhysDeltaX();
  const int nx = std::max(3, static_cast<int>(std::lround(s.length / dx)));
  const int ny = s.resolution + 2;
  // Cell (ix, iy) sits at ((ix + 1/2) dx, (iy - 1/2) dx): rows 1..N are fluid
  // and the walls lie half a link outside them, at y = 0 and y = H.
  Geometry geo(nx, ny, {0.5 * dx, -0.5 * dx}, dx, 1);
  const double wide = (nx + 2) * dx;
  geo.rename(1, 2, Indicator::cuboid({-dx, -s.height}, {wide, s.height}));
  geo.rename(1, 2, Indicator::cuboid({-dx, s.height}, {wide, s.height}));
  if (s.mode == PoiseuilleMode::InletOutlet) {
    geo.rename(1, 3, Indicator::cuboid({-dx, 0.0}, {2.0 * dx, s.height}));
    geo.rename(1, 4, Indicator::cuboid({(nx - 1) * dx, 0.0}, {2.0 * dx, s.height}));
  }
  return geo;
}

} // namespace detail

/// Runs one resolution. `inletScale` multiplies the inlet profile on top of
/// driveScale (the control of the identification case).
inline PoiseuilleRun simulatePoiseuille(const PoiseuilleSetup& s, detail::OutputSink* sink,
                                        double inletScale = 1.0) {
  const Logger log("poiseuille2d");
  UnitConverter conv(s.resolution, s.tau, s.height, s.charVelocity, s.viscosity, s.density);
  Geometry geo = detail::poiseuilleGeometry(s, conv);
  const int N = s.resolution;
  const double uL = conv.getCharLatticeVelocity();
  detail::warnLatticeVelocity(log, uL);

  BlockLattice lattice(LatticeKind::D2Q9, geo.nx(), geo.ny(), {FieldKind::Force});
  const bool forced = s.mode == PoiseuilleMode::ForceDriven;
  const double force = forced ? s.driveScale * 8.0 * conv.getLatticeViscosity() * uL / (N * N) : 0.0;
  const double inletMax = s.driveScale * inletScale * uL;
  const double dx = conv.getPhysDeltaX();
  auto inletProfile = [&](int iy, double scale) {
    return poiseuilleProfile((iy - 0.5) * dx, inletMax * scale, s.height);
  };

  for (int iy = 0; iy < geo.ny(); ++iy) {
    for (int ix = 0; ix < geo.nx(); ++ix) {
      switch (geo.get(ix, iy)) {
      case 1: lattice.setTag(ix, iy, forced ? DynamicsTag::ForcedBGK : DynamicsTag::BGK); break;
      case 2: lattice.setTag(ix, iy, DynamicsTag::BounceBack); break;
      case 3:
        lattice.setTag(ix, iy, DynamicsTag::ZouHeVelocity);
        lattice.boundary(ix, iy).normal = {1, 0};
        break;
      case 4:
        lattice.setTag(ix, iy, DynamicsTag::ZouHePressure);
        lattice.boundary(ix, iy).normal = {-1, 0};
        lattice.boundary(ix, iy).rho = 1.0;
        break;
      default: break;
      }
      lattice.defineEquilibrium(ix, iy, 1.0, {0.0, 0.0});
    }
  }
  lattice.fillVectorField(FieldKind::Force, {force, 0.0});

  const DynamicsParams params{conv.getOmega(), 0.25};
  params.validate();
  const MaterialIndicator fluid = materialIndicator(geo, {1});
  const long long maxSteps = detail::positiveSteps(conv, s.maxPhysTime);
  const long long rampSteps = detail::positiveSteps(conv, s.startUpTime);
  const long long saveSteps = detail::positiveSteps(conv, s.saveTime);
  ValueTracer tracer(static_cast<std::size_t>(std::max<long long>(2, conv.getLatticeTime(s.interval))),
                     s.residuum);

  PoiseuilleRun run{conv, geo, std::move(lattice), 0, false, {}};
  BlockLattice& lat = run.lattice;
  const std::string dumpName = "poiseuille2d_N" + std::to_string(N);
  for (long long step = 0; step < maxSteps; ++step) {
    if (!forced && step <= rampSteps) {
      const double frac = startScale(step, rampSteps, StartScaleKind::Sinus);
      for (int iy = 0; iy < geo.ny(); ++iy) {
        if (geo.get(0, iy) == 3) {
          lat.boundary(0, iy).u = {inletProfile(iy, frac), 0.0};
        }
      }
    }
    detail::stepChecked(lat, params, step);
    run.steps = step + 1;
    if (sink != nullptr && run.steps % saveSteps == 0) {
      detail::dumpFlow(*sink, dumpName, run.steps, detail::snapshotFlow(lat, geo, conv));
    }
    tracer.takeValue(detail::averageEnergy(lat, fluid));
    if (!run.converged && tracer.hasConverged()) {
      run.converged = true;
      log.info("step ", run.steps, ": converged (t = ", conv.getPhysTime(run.steps), ")");
      if (s.stopOnConvergence) {
        break;
      }
    }
  }
  detail::warnLatticeVelocity(log, detail::maxSpeed(lat, fluid));

  const auto snap = detail::snapshotFlow(lat, geo, conv);
  const double umax = s.driveScale * inletScale * s.charVelocity;
  const std::function<std::array<double, 2>(const Vec2&)> ref = [&](const Vec2& x) {
    return std::array<double, 2>{poiseuilleProfile(x[1], umax, s.height), 0.0};
  };
  run.errors = detail::safeErrorNorms<2>(snap.velocity, ref, fluid);
  if (sink != nullptr && sink->enabled()) {
    detail::dumpFlow(*sink, dumpName, run.steps, snap);
    writePPMHeatmap(sink->path(dumpName + "_velocity.ppm"), snap.speed, Colormap::Rainbow);
  }
  return run;
}

inline CaseReport runPoiseuille2d(const CaseConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  CaseReport report;
  report.caseName = "poiseuille2d";
  report.eocColumn = "relL2";
  detail::OutputSink sink(cfg, report.caseName, report.files);
  PoiseuilleSetup setup = PoiseuilleSetup::fromConfig(cfg.tree);
  const auto res = detail::resolutions(cfg.tree, "51");
  report.columns = {"N",      "deltaX", "steps",  "converged", "absL1", "absL2",
                    "absLinf", "relL1", "relL2", "relLinf"};
  std::vector<std::pair<double, double>> eocData;
  report.converged = true;
  for (int N : res) {
    setup.resolution = N;
    Logger("poiseuille2d").info("resolution N = ", N);
    const PoiseuilleRun run = simulatePoiseuille(setup, &sink);
    const ErrorNorms& e = run.errors;
    report.rows.push_back({static_cast<double>(N), run.converter.getPhysDeltaX(),
                           static_cast<double>(run.steps), run.converged ? 1.0 : 0.0, e.absL1,
                           e.absL2, e.absLinf, e.relL1, e.relL2, e.relLinf});
    report.converged = report.converged && run.converged;
    report.convergenceStep = run.converged ? run.steps : -1;
    eocData.emplace_back(run.converter.getPhysDeltaX(), e.relL2);
    report.metrics["relL2"] = e.relL2;
    report.metrics["absL2"] = e.absL2;
    report.metrics["relLinf"] = e.relLinf;
    report.metrics["absLinf"] = e.absLinf;
    report.metrics["relL1"] = e.relL1;
    report.metrics["absL1"] = e.absL1;
  }
  if (eocData.size() >= 2 &&
      std::all_of(eocData.begin(), eocData.end(), [](const auto& p) { return p.second > 0.0; })) {
    report.eoc = computeEOC(eocData);
    report.metrics["eoc"] = report.eoc->slope;
  }
  detail::finishTable(report, sink, "poiseuille2d_errors.csv");
  report.wallClockSeconds = detail::elapsedSeconds(start);
  return report;
}

// -- advection-diffusion -------------------------------------------------------------

struct AdeSetup {
  int resolution = 100;
  double diffusivity = 1.5;
  double peclet = 40.0 / 3.0;
  double length = 2.0;
  /// Run until the analytic amplitude falls below this fraction.
  double residualAmplitude = 0.1;
  double saveTime = 0.0;
};

struct AdeRun {
  double deltaX = 0.0;
  long long steps = 0;
  double averageError = 0.0;
  double finalError = 0.0;
  double initialError = 0.0;
};

namespace detail {

/// Periodic D2Q5 run on [-1,1] (x only when `twoD` is false) initialized with
/// the analytic solution; returns the time-averaged relative L2 error.
inline AdeRun simulateAde(const AdeSetup& s, bool twoD, OutputSink* sink) {
  const Logger log(twoD ? "advectionDiffusion2d" : "advectionDiffusion1d");
  const int N = s.resolution;
  const double u = s.peclet * s.diffusivity / s.length;
  // Diffusive scaling dt = dx^2: a flow converter whose lattice viscosity
  // equals the physical one.
  const UnitConverter conv(N, 0.5 + s.diffusivity / UnitConverter::kCs2, s.length,
                           u != 0.0 ? std::abs(u) : 1.0, s.diffusivity, 1.0);
  const AdeUnitConverter ade = makeAdeConverter(conv, s.diffusivity, UnitConverter::kCs2);
  const double dx = conv.getPhysDeltaX();
  const std::array<double, 2> uPhys{u, twoD ? u : 0.0};
  const std::array<double, 2> uLat{conv.getLatticeVelocity(uPhys[0]),
                                   conv.getLatticeVelocity(uPhys[1])};
  warnLatticeVelocity(log, std::max(std::abs(uLat[0]), std::abs(uLat[1])));

  const int nx = N;
  const int ny = twoD ? N : 1;
  const Vec2 origin{-1.0, twoD ? -1.0 : 0.0};
  BlockLattice lattice(LatticeKind::D2Q5, nx, ny, {FieldKind::Velocity});
  lattice.fillVectorField(FieldKind::Velocity, uLat);
  std::vector<double> xs(static_cast<std::size_t>(nx));
  std::vector<double> ys(static_cast<std::size_t>(ny));
  for (int ix = 0; ix < nx; ++ix) {
    xs[static_cast<std::size_t>(ix)] = origin[0] + ix * dx;
  }
  for (int iy = 0; iy < ny; ++iy) {
    ys[static_cast<std::size_t>(iy)] = origin[1] + iy * dx;
  }
  auto analytic = [&](int ix, int iy, double t) {
    const double x = xs[static_cast<std::size_t>(ix)];
    return twoD ? adeAnalytic2d(x, ys[static_cast<std::size_t>(iy)], t, uPhys, s.diffusivity)
                : adeAnalytic1d(x, t, uPhys[0], s.diffusivity);
  };
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      lattice.setTag(ix, iy, DynamicsTag::AdeBGK);
      lattice.defineAdeEquilibrium(ix, iy, analytic(ix, iy, 0.0), uLat);
    }
  }

  // Separable evaluation of the analytic field: one sine per row and column.
  constexpr double pi = std::numbers::pi;
  std::vector<double> sx(static_cast<std::size_t>(nx));
  std::vector<double> sy(static_cast<std::size_t>(ny), 1.0);
  std::vector<double> rho(lattice.cellCount());
  auto relativeError = [&](double t) {
    for (int ix = 0; ix < nx; ++ix) {
      sx[static_cast<std::size_t>(ix)] = std::sin(pi * (xs[static_cast<std::size_t>(ix)] - uPhys[0] * t));
    }
    if (twoD) {
      for (int iy = 0; iy < ny; ++iy) {
        sy[static_cast<std::size_t>(iy)] = std::sin(pi * (ys[static_cast<std::size_t>(iy)] - uPhys[1] * t));
      }
    }
    const double decay = std::exp(-(twoD ? 2.0 : 1.0) * s.diffusivity * pi * pi * t);
    lattice.densities(rho);
    double num = 0.0;
    double den = 0.0;
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        const double a = sx[static_cast<std::size_t>(ix)] * sy[static_cast<std::size_t>(iy)] * decay;
        const double d = rho[lattice.cellIndex(ix, iy)] - a;
        num += d * d;
        den += a * a;
      }
    }
    return std::sqrt(num / den);
  };

  const DynamicsParams params{ade.getOmega(), 0.25};
  params.validate();
  const double rate = (twoD ? 2.0 : 1.0) * s.diffusivity * pi * pi;
  AdeRun run;
  run.deltaX = dx;
  run.initialError = relativeError(0.0);
  const long long saveSteps = s.saveTime > 0.0 ? positiveSteps(conv, s.saveTime) : 0;
  const std::string name =
    std::string(twoD ? "advectionDiffusion2d" : "advectionDiffusion1d") + "_N" + std::to_string(N);
  auto dump = [&](long long step) {
    if (sink == nullptr || !sink->enabled()) {
      return;
    }
    ScalarField field(nx, ny, origin, dx);
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        field.at(ix, iy) = lattice.density(ix, iy);
      }
    }
    writeVTI(sink->path(vtiFileName(name, step)), vtiGridOf(field), {toVtiArray("density", field)});
    if (twoD) {
      writePPMHeatmap(sink->path(name + "_iT" + std::to_string(step) + ".ppm"), field,
                      Colormap::Rainbow);
    }
  };
  dump(0);
  double errSum = 0.0;
  for (long long step = 0;; ++step) {
    stepChecked(lattice, params, step);
    run.steps = step + 1;
    const double t = conv.getPhysTime(run.steps);
    const double err = relativeError(t);
    if (!std::isfinite(err)) {
      throw NumericalBlowup("non-finite concentration at step " + std::to_string(run.steps),
                            static_cast<std::size_t>(run.steps));
    }
    errSum += err;
    run.finalError = err;
    if (saveSteps > 0 && run.steps % saveSteps == 0) {
      dump(run.steps);
    }
    if (std::exp(-rate * t) < s.residualAmplitude) {
      break;
    }
    if (run.steps > 100000000LL) {
      throw ValidationError("advection-diffusion run does not terminate");
    }
  }
  run.averageError = errSum / static_cast<double>(run.steps);
  dump(run.steps);
  log.info("N = ", N, ": ", run.steps, " steps, average relative L2 error ", run.averageError);
  return run;
}

inline CaseReport runAdvectionDiffusion(const CaseConfig& cfg, bool twoD) {
  const auto start = std::chrono::steady_clock::now();
  CaseReport report;
  report.caseName = twoD ? "advectionDiffusion2d" : "advectionDiffusion1d";
  report.eocColumn = "averageRelL2";
  OutputSink sink(cfg, report.caseName, report.files);
  const ConfigTree& t = cfg.tree;
  AdeSetup s;
  s.diffusivity = t.getDouble("Application.PhysParameters.Diffusivity", twoD ? 0.05 : 1.5);
  s.peclet = t.getDouble("Application.PhysParameters.Pe", twoD ? 100.0 : 40.0 / 3.0);
  s.length = t.getDouble("Application.PhysParameters.CharPhysLength", 2.0);
  s.residualAmplitude = t.getDouble("Application.PhysParameters.ResidualAmplitude", 0.1);
  s.saveTime = t.getDouble("Output.VtkOutput.SaveTime", 0.0);
  if (!(s.residualAmplitude > 0.0 && s.residualAmplitude < 1.0)) {
    throw ValidationError("ResidualAmplitude must lie in (0,1)");
  }
  const auto res = resolutions(t, "50,100,200");
  report.columns = {"N", "deltaX", "steps", "averageRelL2", "finalRelL2", "initialRelL2"};
  std::vector<std::pair<double, double>> eocData;
  for (int N : res) {
    s.resolution = N;
    const AdeRun run = simulateAde(s, twoD, &sink);
    report.rows.push_back({static_cast<double>(N), run.deltaX, static_cast<double>(run.steps),
                           run.averageError, run.finalError, run.initialError});
    eocData.emplace_back(run.deltaX, run.averageError);
    report.metrics["averageRelL2"] = run.averageError;
    report.metrics["initialRelL2"] = run.initialError;
  }
  report.converged = true;
  if (eocData.size() >= 2) {
    report.eoc = computeEOC(eocData);
    report.metrics["eoc"] = report.eoc->slope;
  }
  // Mirrors averageSimL2RelErr.dat.
  finishTable(report, sink, "averageSimL2RelErr.csv");
  report.wallClockSeconds = elapsedSeconds(start);
  return report;
}

} // namespace detail

inline CaseReport runAdvectionDiffusion1d(const CaseConfig& cfg) {
  return detail::runAdvectionDiffusion(cfg, false);
}

inline CaseReport runAdvectionDiffusion2d(const CaseConfig& cfg) {
  return detail::runAdvectionDiffusion(cfg, true);
}

// -- porousPlate2d -------------------------------------------------------------------

/// Couette flow with wall-normal injection: the lower plate (y = 0) rests and
/// injects fluid at v, the upper plate (y = L) moves at u0 and withdraws it.
/// Temperatures: Tc at the lower plate, Tc + deltaT at the upper one.
inline CaseReport runPorousPlate2d(const CaseConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const Logger log("porousPlate2d");
  CaseReport report;
  report.caseName = "porousPlate2d";
  detail::OutputSink sink(cfg, report.caseName, report.files);
  const ConfigTree& t = cfg.tree;
  const int N = static_cast<int>(t.getInt("Application.Discretization.Resolution", 64));
  const double tau = t.getDouble("Application.Discretization.LatticeRelaxationTime", 1.0);
  const int width = static_cast<int>(t.getInt("Application.Discretization.Width", 4));
  const double L = t.getDouble("Application.PhysParameters.CharPhysLength", 1.0);
  const double u0 = t.getDouble("Application.PhysParameters.CharPhysVelocity", 1.0);
  const double nu = t.getDouble("Application.PhysParameters.PhysViscosity", 0.1);
  const double Re = t.getDouble("Application.PhysParameters.Re", 2.0);
  const double Pr = t.getDouble("Application.PhysParameters.Pr", 1.0);
  const double Tc = t.getDouble("Application.PhysParameters.Tcold", 0.0);
  const double dT = t.getDouble("Application.PhysParameters.DeltaT", 1.0);
  const double maxT = t.getDouble("Application.PhysParameters.PhysMaxTime", 100.0);
  const double interval = t.getDouble("Application.ConvergenceCheck.Interval", 1.0);
  const double residuum = t.getDouble("Application.ConvergenceCheck.Residuum", 1e-7);
  const double saveTime = t.getDouble("Output.VtkOutput.SaveTime", 20.0);
  if (N < 2 || width < 1) {
    throw ValidationError("porous plate needs Resolution >= 2 and Width >= 1");
  }
  if (!(Pr > 0.0)) {
    throw ValidationError("Prandtl number must be positive");
  }

  const UnitConverter conv(N, tau, L, u0, nu, 1.0);
  const AdeUnitConverter adeConv = makeAdeConverter(conv, nu / Pr, UnitConverter::kCs2);
  const double dx = conv.getPhysDeltaX();
  const double vInject = Re * nu / L;
  const double u0L = conv.getCharLatticeVelocity();
  const double vL = conv.getLatticeVelocity(vInject);
  detail::warnLatticeVelocity(log, std::max(u0L, std::abs(vL)));

  // Wet nodes: rows 0 and N lie on the plates.
  Geometry geo(width, N + 1, {0.0, 0.0}, dx, 1);
  geo.rename(1, 3, Indicator::cuboid({-1.0, -L}, {width * dx + 2.0, L + 0.5 * dx}));
  geo.rename(1, 4, Indicator::cuboid({-1.0, L - 0.5 * dx}, {width * dx + 2.0, L}));

  BlockLattice nse(LatticeKind::D2Q9, geo.nx(), geo.ny());
  BlockLattice ade(LatticeKind::D2Q5, geo.nx(), geo.ny(), {FieldKind::Velocity});
  for (int iy = 0; iy < geo.ny(); ++iy) {
    for (int ix = 0; ix < geo.nx(); ++ix) {
      const int m = geo.get(ix, iy);
      if (m == 1) {
        nse.setTag(ix, iy, DynamicsTag::BGK);
        ade.setTag(ix, iy, DynamicsTag::AdeBGK);
      } else {
        const bool lower = m == 3;
        nse.setTag(ix, iy, DynamicsTag::ZouHeVelocity);
        nse.boundary(ix, iy).normal = {0, lower ? 1 : -1};
        nse.boundary(ix, iy).u = {lower ? 0.0 : u0L, vL};
        ade.setTag(ix, iy, DynamicsTag::AdeDirichlet);
        ade.boundary(ix, iy).normal = {0, lower ? 1 : -1};
        ade.boundary(ix, iy).value = lower ? Tc : Tc + dT;
      }
      nse.defineEquilibrium(ix, iy, 1.0, {0.0, vL});
      ade.defineAdeEquilibrium(ix, iy, m == 4 ? Tc + dT : Tc, {0.0, vL});
    }
  }
  coupleVelocity(nse, ade);

  const DynamicsParams nseParams{conv.getOmega(), 0.25};
  const DynamicsParams adeParams{adeConv.getOmega(), 0.25};
  nseParams.validate();
  adeParams.validate();
  const MaterialIndicator fluid = materialIndicator(geo, {1});
  const auto window = static_cast<std::size_t>(std::max<long long>(2, conv.getLatticeTime(interval)));
  ValueTracer energyTracer(window, residuum);
  ValueTracer temperatureTracer(window, residuum);
  const long long maxSteps = detail::positiveSteps(conv, maxT);
  const long long saveSteps = detail::positiveSteps(conv, saveTime);

  auto sample = [&](VectorField& u, ScalarField& T) {
    for (int iy = 0; iy < geo.ny(); ++iy) {
      for (int ix = 0; ix < geo.nx(); ++ix) {
        const Moments m = nse.moments(ix, iy);
        u.at(ix, iy, 0) = conv.getPhysVelocity(m.u[0]);
        u.at(ix, iy, 1) = conv.getPhysVelocity(m.u[1]);
        T.at(ix, iy) = ade.density(ix, iy);
      }
    }
  };
  auto dump = [&](long long step) {
    if (!sink.enabled()) {
      return;
    }
    VectorField u(geo.nx(), geo.ny(), geo.origin(), dx);
    ScalarField T(geo.nx(), geo.ny(), geo.origin(), dx);
    sample(u, T);
    writeVTI(sink.path(vtiFileName("porousPlate2d", step)), vtiGridOf(u),
             {toVtiArray("velocity", u), toVtiArray("temperature", T)});
  };

  long long steps = 0;
  for (long long step = 0; step < maxSteps; ++step) {
    detail::stepChecked(nse, nseParams, step);
    coupleVelocity(nse, ade);
    detail::stepChecked(ade, adeParams, step);
    steps = step + 1;
    if (steps % saveSteps == 0) {
      dump(steps);
    }
    energyTracer.takeValue(detail::averageEnergy(nse, fluid));
    double meanT = 0.0;
    for (int iy = 1; iy < geo.ny() - 1; ++iy) {
      for (int ix = 0; ix < geo.nx(); ++ix) {
        meanT += ade.density(ix, iy);
      }
    }
    if (!std::isfinite(meanT)) {
      throw NumericalBlowup("non-finite temperature at step " + std::to_string(steps),
                            static_cast<std::size_t>(steps));
    }
    temperatureTracer.takeValue(meanT / static_cast<double>(fluid.count()));
    if (energyTracer.hasConverged() && temperatureTracer.hasConverged()) {
      report.converged = true;
      report.convergenceStep = steps;
      log.info("step ", steps, ": converged (t = ", conv.getPhysTime(steps), ")");
      break;
    }
  }

  VectorField u(geo.nx(), geo.ny(), geo.origin(), dx);
  ScalarField T(geo.nx(), geo.ny(), geo.origin(), dx);
  sample(u, T);
  // Streamwise component only, as in the closed form.
  ScalarField ux(geo.nx(), geo.ny(), geo.origin(), dx);
  for (int iy = 0; iy < geo.ny(); ++iy) {
    for (int ix = 0; ix < geo.nx(); ++ix) {
      ux.at(ix, iy) = u.at(ix, iy, 0);
    }
  }
  const auto all = allCells();
  const double Eu = errorNorm(
    ux, [&](const Vec2& x) { return porousPlateAnalytic(x[1], L, Re, Pr, u0, Tc, dT).u; }, all,
    NormKind::L2, true);
  const double ET = errorNorm(
    T, [&](const Vec2& x) { return porousPlateAnalytic(x[1], L, Re, Pr, u0, Tc, dT).T; }, all,
    NormKind::L2, true);
  double collapse = 0.0;
  for (int iy = 0; iy < geo.ny(); ++iy) {
    for (int ix = 0; ix < geo.nx(); ++ix) {
      collapse = std::max(collapse, std::abs(ux.at(ix, iy) / u0 - (T.at(ix, iy) - Tc) / dT));
    }
  }
  report.metrics["E_u"] = Eu;
  report.metrics["E_T"] = ET;
  report.metrics["profileCollapseGap"] = collapse;
  report.metrics["steps"] = static_cast<double>(steps);
  report.columns = {"y", "u_x", "u_x_analytic", "T", "T_analytic"};
  const int cx = geo.nx() / 2;
  for (int iy = 0; iy < geo.ny(); ++iy) {
    const double y = iy * dx;
    const auto a = porousPlateAnalytic(y, L, Re, Pr, u0, Tc, dT);
    report.rows.push_back({y, ux.at(cx, iy), a.u, T.at(cx, iy), a.T});
  }
  detail::finishTable(report, sink, "porousPlate2d_profiles.csv");
  if (sink.enabled()) {
    dump(steps);
    writePPMHeatmap(sink.path("porousPlate2d_temperature.ppm"), T, Colormap::Rainbow);
  }
  log.info("E_u = ", Eu, ", E_T = ", ET);
  report.wallClockSeconds = detail::elapsedSeconds(start);
  return report;
}

// -- cavity2d ------------------------------------------------------------------------

struct CavityRun {
  BlockLattice lattice;
  long long steps = 0;
  bool converged = false;
  double meanDensity = 1.0;
};

inline CavityRun simulateCavity(const ConfigTree& t, detail::OutputSink* sink) {
  const Logger log("cavity2d");
  const int N = static_cast<int>(t.getInt("Application.Discretization.Resolution", 64));
  const double tau = t.getDouble("Application.Discretization.LatticeRelaxationTime", 0.7);
  const double L = t.getDouble("Application.PhysParameters.CharPhysLength", 1.0);
  const double U = t.getDouble("Application.PhysParameters.CharPhysVelocity", 1.0);
  const double nu = t.getDouble("Application.PhysParameters.PhysViscosity", 0.01);
  const double lidScale = t.getDouble("Application.PhysParameters.LidScale", 1.0);
  const double maxT = t.getDouble("Application.PhysParameters.PhysMaxTime", 100.0);
  const double startUp = t.getDouble("Application.PhysParameters.StartUpTime", 5.0);
  const double interval = t.getDouble("Application.ConvergenceCheck.Interval", 1.0);
  const double residuum = t.getDouble("Application.ConvergenceCheck.Residuum", 1e-5);
  const bool stop = t.getBool("Application.ConvergenceCheck.StopOnConvergence", true);
  const double saveTime = t.getDouble("Output.VtkOutput.SaveTime", 20.0);

  const UnitConverter conv(N, tau, L, U, nu, 1.0);
  const double dx = conv.getPhysDeltaX();
  const double uLid = lidScale * conv.getCharLatticeVelocity();
  detail::warnLatticeVelocity(log, uLid);
  // Fluid rows/columns 1..N; bounce-back frame; the top row is the lid, its
  // two corner cells stay walls.
  Geometry geo(N + 2, N + 2, {-0.5 * dx, -0.5 * dx}, dx, 2);
  geo.rename(2, 1, Indicator::cuboid({0.0, 0.0}, {L, L}));
  geo.rename(2, 3, Indicator::cuboid({0.0, L}, {L, dx}));

  BlockLattice lattice(LatticeKind::D2Q9, geo.nx(), geo.ny());
  for (int iy = 0; iy < geo.ny(); ++iy) {
    for (int ix = 0; ix < geo.nx(); ++ix) {
      switch (geo.get(ix, iy)) {
      case 1: lattice.setTag(ix, iy, DynamicsTag::BGK); break;
      case 3:
        lattice.setTag(ix, iy, DynamicsTag::ZouHeVelocity);
        lattice.boundary(ix, iy).normal = {0, -1};
        break;
      default: lattice.setTag(ix, iy, DynamicsTag::BounceBack); break;
      }
      lattice.defineEquilibrium(ix, iy, 1.0, {0.0, 0.0});
    }
  }
  const DynamicsParams params{conv.getOmega(), 0.25};
  params.validate();
  const MaterialIndicator fluid = materialIndicator(geo, {1});
  const long long maxSteps = detail::positiveSteps(conv, maxT);
  const long long rampSteps = detail::positiveSteps(conv, startUp);
  const long long saveSteps = detail::positiveSteps(conv, saveTime);
  ValueTracer tracer(static_cast<std::size_t>(std::max<long long>(2, conv.getLatticeTime(interval))),
                     residuum);
  CavityRun run{std::move(lattice), 0, false, 1.0};
  BlockLattice& lat = run.lattice;
  for (long long step = 0; step < maxSteps; ++step) {
    if (step <= rampSteps) {
      const double frac = startScale(step, rampSteps, StartScaleKind::Polynomial);
      for (int ix = 0; ix < geo.nx(); ++ix) {
        if (geo.get(ix, geo.ny() - 1) == 3) {
          lat.boundary(ix, geo.ny() - 1).u = {uLid * frac, 0.0};
        }
      }
    }
    detail::stepChecked(lat, params, step);
    run.steps = step + 1;
    if (sink != nullptr && run.steps % saveSteps == 0) {
      detail::dumpFlow(*sink, "cavity2d", run.steps, detail::snapshotFlow(lat, geo, conv));
    }
    tracer.takeValue(detail::averageEnergy(lat, fluid));
    if (!run.converged && step >= rampSteps && tracer.hasConverged()) {
      run.converged = true;
      log.info("step ", run.steps, ": converged (t = ", conv.getPhysTime(run.steps), ")");
      if (stop) {
        break;
      }
    }
  }
  double rhoSum = 0.0;
  for (int iy = 0; iy < geo.ny(); ++iy) {
    for (int ix = 0; ix < geo.nx(); ++ix) {
      if (fluid(ix, iy)) {
        rhoSum += lat.density(ix, iy);
      }
    }
  }
  run.meanDensity = rhoSum / static_cast<double>(fluid.count());
  if (sink != nullptr && sink->enabled()) {
    const auto snap = detail::snapshotFlow(lat, geo, conv);
    detail::dumpFlow(*sink, "cavity2d", run.steps, snap);
    writePPMHeatmap(sink->path("cavity2d_velocity.ppm"), snap.speed, Colormap::Rainbow);
  }
  return run;
}

inline CaseReport runCavity2d(const CaseConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  CaseReport report;
  report.caseName = "cavity2d";
  detail::OutputSink sink(cfg, report.caseName, report.files);
  const CavityRun run = simulateCavity(cfg.tree, &sink);
  report.converged = run.converged;
  report.convergenceStep = run.converged ? run.steps : -1;
  report.metrics["meanDensity"] = run.meanDensity;
  report.metrics["densityDrift"] = std::abs(run.meanDensity - 1.0);
  report.metrics["steps"] = static_cast<double>(run.steps);
  report.columns = {"steps", "converged", "meanDensity"};
  report.rows.push_back(
    {static_cast<double>(run.steps), run.converged ? 1.0 : 0.0, run.meanDensity});
  detail::finishTable(report, sink, "cavity2d_summary.csv");
  report.wallClockSeconds = detail::elapsedSeconds(start);
  return report;
}

// -- optimization cases -------------------------------------------------------------------

inline OptimizerParams optimizerParamsFromConfig(const ConfigTree& t, OptimizerParams d) {
  OptimizerParams p = d;
  p.method = optimizerMethodFromString(t.getString(
    "Optimization.Method", d.method == OptimizerMethod::LBFGS             ? "LBFGS"
                           : d.method == OptimizerMethod::SteepestDescent ? "SteepestDescent"
                                                                          : "BarzilaiBorwein"));
  p.maxIt = static_cast<int>(t.getInt("Optimization.MaxIter", d.maxIt));
  p.maxStepAttempts = static_cast<int>(t.getInt("Optimization.MaxStepAttempts", d.maxStepAttempts));
  p.eps = t.getDouble("Optimization.Tolerance", d.eps);
  p.controlEps = t.getDouble("Optimization.ControlTolerance", d.controlEps);
  p.lambda = t.getDouble("Optimization.Lambda", d.lambda);
  p.memory = static_cast<int>(t.getInt("Optimization.L", d.memory));
  p.armijoRho = t.getDouble("Optimization.ArmijoRho", d.armijoRho);
  p.wolfeDelta = t.getDouble("Optimization.WolfeDelta", d.wolfeDelta);
  p.failOnMaxIter = t.getBool("Optimization.FailOnMaxIter", d.failOnMaxIter);
  if (t.contains("Optimization.StepCondition")) {
    p.stepCondition = stepConditionFromString(*t.raw("Optimization.StepCondition"));
  }
  return p;
}

namespace detail {

inline void writeTrace(OutputSink& sink, const std::string& name,
                       const std::vector<TraceEntry>& trace) {
  if (!sink.enabled()) {
    return;
  }
  std::vector<std::vector<double>> rows;
  for (const auto& e : trace) {
    rows.push_back({static_cast<double>(e.iteration), e.value, e.gradNorm, e.step});
  }
  writeCSV(sink.path(name), {"it", "J", "gradNorm", "step"}, rows);
}

inline void fillOptimizerReport(CaseReport& report, const OptimizerResult& r) {
  report.trace = r.trace;
  report.control = r.control;
  report.converged = r.converged;
  report.convergenceStep = r.iterations;
  report.optimizerStatus = r.stopReason;
  report.metrics["J"] = r.value;
  report.metrics["iterations"] = r.iterations;
  report.metrics["gradNorm"] = euclideanNorm(r.gradient);
  report.columns = {"it", "J", "gradNorm", "step"};
  for (const auto& e : r.trace) {
    report.rows.push_back({static_cast<double>(e.iteration), e.value, e.gradNorm, e.step});
  }
}

} // namespace detail

inline double rosenbrock(const Control& a) {
  const double x = a.at(0);
  const double y = a.at(1);
  return (1.0 - x) * (1.0 - x) + 100.0 * (y - x * x) * (y - x * x);
}

inline Control rosenbrockGradient(const Control& a) {
  const double x = a.at(0);
  const double y = a.at(1);
  return {-2.0 * (1.0 - x) - 400.0 * x * (y - x * x), 200.0 * (y - x * x)};
}

inline CaseReport runRosenbrock(const CaseConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  CaseReport report;
  report.caseName = "rosenbrock";
  detail::OutputSink sink(cfg, report.caseName, report.files);
  const ConfigTree& t = cfg.tree;
  OptimizationProblem problem;
  problem.objective = rosenbrock;
  problem.gradient = rosenbrockGradient;
  problem.gradientMode = gradientModeFromString(t.getString("Optimization.GradientMode", "Provided"));
  problem.fdStep = t.getDouble("Optimization.FdStep", 1e-6);
  const OptimizerParams params = optimizerParamsFromConfig(t, OptimizerParams{});
  const Control alpha0 = detail::parseDoubleList(t.getString("Optimization.StartValue", "-1.2,1"));
  if (alpha0.size() != 2) {
    throw ValidationError("Rosenbrock start value needs two components");
  }
  const OptimizerResult r = optimize(problem, params, alpha0);
  detail::fillOptimizerReport(report, r);
  detail::writeTrace(sink, "rosenbrock_trace.csv", r.trace);
  report.wallClockSeconds = detail::elapsedSeconds(start);
  return report;
}

/// Identification of the inlet velocity scale from a target mass flow at
/// mid-channel. The target comes from a forward run at TrueControl.
struct IdentificationSetup {
  PoiseuilleSetup flow;
  double trueControl = 1.0;
  double startControl = 0.5;
};

/// Physical mass flux through the mid-channel cross section after a fixed
/// forward run with the given inlet scale.
inline double poiseuilleMassFlow(const PoiseuilleSetup& flow, double control) {
  PoiseuilleSetup s = flow;
  s.stopOnConvergence = false;
  const PoiseuilleRun run = simulatePoiseuille(s, nullptr, control);
  const Geometry& geo = run.geometry;
  VectorField momentum(geo.nx(), geo.ny(), geo.origin(), geo.deltaX());
  const int mid = geo.nx() / 2;
  for (int iy = 0; iy < geo.ny(); ++iy) {
    if (geo.get(mid, iy) != 1) {
      continue;
    }
    const Moments m = run.lattice.moments(mid, iy);
    const double rho = run.converter.getPhysDensity(m.rho);
    momentum.at(mid, iy, 0) = rho * run.converter.getPhysVelocity(m.u[0]);
    momentum.at(mid, iy, 1) = rho * run.converter.getPhysVelocity(m.u[1]);
  }
  const MaterialIndicator fluid = materialIndicator(geo, {1});
  return lineFlux(momentum, {mid, 0}, {1, 0}, geo.ny(), fluid).flux;
}

inline CaseReport runPoiseuilleIdentification(const CaseConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  CaseReport report;
  report.caseName = "poiseuilleIdentification";
  detail::OutputSink sink(cfg, report.caseName, report.files);
  const ConfigTree& t = cfg.tree;
  IdentificationSetup s;
  s.flow.mode = PoiseuilleMode::InletOutlet;
  s.flow.resolution = static_cast<int>(t.getInt("Application.Discretization.Resolution", 11));
  s.flow.tau = t.getDouble("Application.Discretization.LatticeRelaxationTime", 0.8);
  s.flow.height = t.getDouble("Application.PhysParameters.CharPhysLength", 1.0);
  s.flow.length = t.getDouble("Application.PhysParameters.ChannelLength", 2.0 * s.flow.height);
  s.flow.charVelocity = t.getDouble("Application.PhysParameters.CharPhysVelocity", 1.0);
  s.flow.viscosity = t.getDouble("Application.PhysParameters.PhysViscosity", 0.1);
  s.flow.maxPhysTime = t.getDouble("Application.PhysParameters.PhysMaxTime", 4.0);
  s.flow.startUpTime = t.getDouble("Application.PhysParameters.StartUpTime", 1.0);
  s.trueControl = t.getDouble("Optimization.TrueControl", 1.0);
  s.startControl = t.getDouble("Optimization.StartValue", 0.5 * s.trueControl);

  const bool quiet = Logger::quiet();
  Logger::quiet() = true;
  struct Restore {
    bool value;
    ~Restore() { Logger::quiet() = value; }
  } restore{quiet};

  const double target = poiseuilleMassFlow(s.flow, s.trueControl);
  OptimizationProblem problem;
  problem.objective = [&](const Control& a) {
    const double m = poiseuilleMassFlow(s.flow, a.at(0));
    return 0.5 * (m - target) * (m - target);
  };
  problem.gradientMode = gradientModeFromString(t.getString("Optimization.GradientMode", "CDQ"));
  if (problem.gradientMode == GradientMode::Provided) {
    throw ValidationError("identification has no analytic gradient; use FDQ or CDQ");
  }
  problem.fdStep = t.getDouble("Optimization.FdStep", 1e-6);
  problem.lower = Control{t.getDouble("Optimization.LowerBound", 0.0)};
  problem.upper = Control{t.getDouble("Optimization.UpperBound", 10.0 * s.trueControl)};
  OptimizerParams defaults;
  defaults.maxIt = 50;
  defaults.failOnMaxIter = false;
  defaults.controlEps = 1e-8;
  defaults.eps = 1e-12;
  const OptimizerParams params = optimizerParamsFromConfig(t, defaults);

  OptimizerResult r;
  try {
    r = optimize(problem, params, {s.startControl});
  } catch (const StepFailure& e) {
    Logger::quiet() = quiet;
    Logger("poiseuilleIdentification").warn(e.what());
    throw;
  }
  Logger::quiet() = quiet;
  detail::fillOptimizerReport(report, r);
  report.metrics["targetMassFlow"] = target;
  report.metrics["trueControl"] = s.trueControl;
  report.metrics["recoveredControl"] = r.control.at(0);
  report.metrics["relativeControlError"] =
    std::abs(r.control.at(0) - s.trueControl) / std::abs(s.trueControl);
  detail::writeTrace(sink, "poiseuilleIdentification_trace.csv", r.trace);
  Logger("poiseuilleIdentification")
    .info("recovered control ", r.control.at(0), " (truth ", s.trueControl, ") after ",
          r.iterations, " iterations");
  report.wallClockSeconds = detail::elapsedSeconds(start);
  return report;
}

// -- registry ----------------------------------------------------------------------------

using CaseFunction = CaseReport (*)(const CaseConfig&);

inline const std::map<std::string, CaseFunction>& caseRegistry() {
  static const std::map<std::string, CaseFunction> registry{
    {"poiseuille2d", runPoiseuille2d},
    {"advectionDiffusion1d", runAdvectionDiffusion1d},
    {"advectionDiffusion2d", runAdvectionDiffusion2d},
    {"porousPlate2d", runPorousPlate2d},
    {"cavity2d", runCavity2d},
    {"rosenbrock", runRosenbrock},
    {"poiseuilleIdentification", runPoiseuilleIdentification},
  };
  return registry;
}

inline std::string caseList() {
  std::string s;
  for (const auto& [name, fn] : caseRegistry()) {
    s += (s.empty() ? "" : ", ") + name;
  }
  return s;
}

inline bool supportsEoc(const std::string& name) {
  return name == "poiseuille2d" || name == "advectionDiffusion1d" || name == "advectionDiffusion2d";
}

inline bool isOptimizationCase(const std::string& name) {
  return name == "rosenbrock" || name == "poiseuilleIdentification";
}

inline CaseReport runCase(const std::string& name, const CaseConfig& cfg) {
  const auto it = caseRegistry().find(name);
  if (it == caseRegistry().end()) {
    throw ValidationError("unknown case '" + name + "'; available: " + caseList());
  }
  return it->second(cfg);
}

} // namespace lbkit
