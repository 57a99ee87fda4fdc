#pragma once

// Structure-of-arrays block lattice and the collide -> stream -> post-step cycle.
//
// Population i of cell (ix, iy) lives at i * nx * ny + iy * nx + ix. Auxiliary
// fields use the same plane layout, one plane per component.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lbkit/boundary.hpp"
#include "lbkit/descriptor.hpp"
#include "lbkit/dynamics.hpp"
#include "lbkit/error.hpp"

namespace lbkit {

enum class DynamicsTag : std::uint8_t {
  NoDynamics,
  BGK,
  ForcedBGK,
  TRT,
  AdeBGK,
  BounceBack,
  ZouHeVelocity,
  ZouHePressure,
  AdeDirichlet,
  AdeNeumann,
  AdeAdiabatic
};

inline bool isBulk(DynamicsTag tag) {
  return tag == DynamicsTag::BGK || tag == DynamicsTag::ForcedBGK || tag == DynamicsTag::TRT ||
         tag == DynamicsTag::AdeBGK;
}

enum class FieldKind { Force, Velocity, Boundary };

inline int fieldComponents(FieldKind kind) { return kind == FieldKind::Boundary ? 1 : 2; }

inline std::string_view fieldName(FieldKind kind) {
  switch (kind) {
  case FieldKind::Force: return "FORCE";
  case FieldKind::Velocity: return "VELOCITY";
  case FieldKind::Boundary: return "BOUNDARY";
  }
  return "";
}

/// Per-cell data of wet-node boundary cells.
struct CellBoundary {
  IntVec2 normal{0, 0};
  double rho = 1.0;
  std::array<double, 2> u{0.0, 0.0};
  /// Dirichlet value; for Neumann cells the wall value from the last post-step.
  double value = 0.0;
};

class BlockLattice {
public:
  BlockLattice(LatticeKind kind, int nx, int ny, std::vector<FieldKind> fields = {})
    : table_(descriptorData(kind)), velocities_(table_), nx_(nx), ny_(ny) {
    if (nx < 1 || ny < 1) {
      throw ValidationError("lattice needs at least one cell per axis");
    }
    cells_ = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    populations_.assign(cells_ * static_cast<std::size_t>(velocities_.q), 0.0);
    scratch_.assign(populations_.size(), 0.0);
    tags_.assign(cells_, DynamicsTag::NoDynamics);
    boundary_.assign(cells_, CellBoundary{});
    std::sort(fields.begin(), fields.end());
    fields.erase(std::unique(fields.begin(), fields.end()), fields.end());
    for (FieldKind f : fields) {
      fieldKinds_.push_back(f);
      fieldData_.emplace_back(cells_ * static_cast<std::size_t>(fieldComponents(f)), 0.0);
    }
  }

  const DescriptorTable& descriptor() const noexcept { return table_; }
  const VelocitySet& velocities() const noexcept { return velocities_; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  int q() const noexcept { return velocities_.q; }
  std::size_t cellCount() const noexcept { return cells_; }

  std::size_t cellIndex(int ix, int iy) const noexcept {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(ix);
  }

  std::span<double> plane(int i) {
    return {populations_.data() + static_cast<std::size_t>(i) * cells_, cells_};
  }
  std::span<const double> plane(int i) const {
    return {populations_.data() + static_cast<std::size_t>(i) * cells_, cells_};
  }
  std::span<double> populations() noexcept { return populations_; }
  std::span<const double> populations() const noexcept { return populations_; }

  double& f(int i, int ix, int iy) {
    return populations_[static_cast<std::size_t>(i) * cells_ + cellIndex(ix, iy)];
  }
  double f(int i, int ix, int iy) const {
    return populations_[static_cast<std::size_t>(i) * cells_ + cellIndex(ix, iy)];
  }

  void gather(std::size_t cell, Populations& out) const {
    for (int i = 0; i < velocities_.q; ++i) {
      out[static_cast<std::size_t>(i)] = populations_[static_cast<std::size_t>(i) * cells_ + cell];
    }
  }
  void scatter(std::size_t cell, const Populations& in) {
    for (int i = 0; i < velocities_.q; ++i) {
      populations_[static_cast<std::size_t>(i) * cells_ + cell] = in[static_cast<std::size_t>(i)];
    }
  }
  Populations cell(int ix, int iy) const {
    Populations out{};
    gather(cellIndex(ix, iy), out);
    return out;
  }
  void setCell(int ix, int iy, const Populations& in) { scatter(cellIndex(ix, iy), in); }

  // -- fields --------------------------------------------------------------

  bool hasField(FieldKind kind) const {
    return std::find(fieldKinds_.begin(), fieldKinds_.end(), kind) != fieldKinds_.end();
  }
  const std::vector<FieldKind>& fieldKinds() const noexcept { return fieldKinds_; }

  std::span<double> field(FieldKind kind, int component = 0) {
    auto& data = fieldStorage(kind);
    checkComponent(kind, component);
    return {data.data() + static_cast<std::size_t>(component) * cells_, cells_};
  }
  std::span<const double> field(FieldKind kind, int component = 0) const {
    const auto& data = const_cast<BlockLattice*>(this)->fieldStorage(kind);
    checkComponent(kind, component);
    return {data.data() + static_cast<std::size_t>(component) * cells_, cells_};
  }
  std::span<double> fieldData(FieldKind kind) { return fieldStorage(kind); }
  std::span<const double> fieldData(FieldKind kind) const {
    return const_cast<BlockLattice*>(this)->fieldStorage(kind);
  }

  std::array<double, 2> vectorField(FieldKind kind, int ix, int iy) const {
    const std::size_t c = cellIndex(ix, iy);
    return {field(kind, 0)[c], field(kind, 1)[c]};
  }
  void setVectorField(FieldKind kind, int ix, int iy, std::array<double, 2> value) {
    const std::size_t c = cellIndex(ix, iy);
    field(kind, 0)[c] = value[0];
    field(kind, 1)[c] = value[1];
  }
  void fillVectorField(FieldKind kind, std::array<double, 2> value) {
    auto x = field(kind, 0);
    auto y = field(kind, 1);
    std::fill(x.begin(), x.end(), value[0]);
    std::fill(y.begin(), y.end(), value[1]);
  }

  // -- dynamics ------------------------------------------------------------

  DynamicsTag tag(int ix, int iy) const { return tags_[cellIndex(ix, iy)]; }
  void setTag(int ix, int iy, DynamicsTag tag) { tags_[cellIndex(ix, iy)] = tag; }
  std::span<const DynamicsTag> tags() const noexcept { return tags_; }

  CellBoundary& boundary(int ix, int iy) { return boundary_[cellIndex(ix, iy)]; }
  const CellBoundary& boundary(int ix, int iy) const { return boundary_[cellIndex(ix, iy)]; }

  /// Populations set to the second-order equilibrium of (rho, u).
  void defineEquilibrium(int ix, int iy, double rho, std::array<double, 2> u) {
    Populations feq{};
    equilibriumSecondOrder(velocities_, rho, u, feq);
    setCell(ix, iy, feq);
  }

  /// Populations set to the first-order (advection-diffusion) equilibrium.
  void defineAdeEquilibrium(int ix, int iy, double rho, std::array<double, 2> u) {
    Populations geq{};
    equilibriumFirstOrder(velocities_, rho, u, geq);
    setCell(ix, iy, geq);
  }

  /// Zeroth moment. Wet-node boundary cells report the value their closure
  /// enforces (the unknown slots hold stale data between steps).
  double density(int ix, int iy) const {
    const auto pops = reconstructed(ix, iy);
    return computeRho(velocities_, std::span<const double>(pops.data(), static_cast<std::size_t>(q())));
  }

  /// density() for every cell, row-major with x fastest.
  void densities(std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < velocities_.q; ++i) {
      const double* p = populations_.data() + static_cast<std::size_t>(i) * cells_;
      for (std::size_t c = 0; c < cells_; ++c) {
        out[c] += p[c];
      }
    }
    for (std::size_t c = 0; c < cells_; ++c) {
      if (needsReconstruction(tags_[c])) {
        const int ix = static_cast<int>(c % static_cast<std::size_t>(nx_));
        const int iy = static_cast<int>(c / static_cast<std::size_t>(nx_));
        out[c] = density(ix, iy);
      }
    }
  }

  /// Density and velocity of a flow cell; force-shifted on ForcedBGK cells and
  /// reconstructed on wet-node boundary cells.
  Moments moments(int ix, int iy) const {
    const auto pops = reconstructed(ix, iy);
    const std::span<const double> f(pops.data(), static_cast<std::size_t>(q()));
    if (tags_[cellIndex(ix, iy)] == DynamicsTag::ForcedBGK && hasField(FieldKind::Force)) {
      const auto force = vectorField(FieldKind::Force, ix, iy);
      return computeMoments(velocities_, f, force.data());
    }
    return computeMoments(velocities_, f);
  }

  // -- streaming -----------------------------------------------------------

  /// f_i(x + c_i) <- f_i(x), periodic on both axes.
  void stream() {
    const auto unx = static_cast<std::size_t>(nx_);
    for (int i = 0; i < velocities_.q; ++i) {
      const int cx = velocities_.cx[static_cast<std::size_t>(i)];
      const int cy = velocities_.cy[static_cast<std::size_t>(i)];
      const double* src = populations_.data() + static_cast<std::size_t>(i) * cells_;
      double* dst = scratch_.data() + static_cast<std::size_t>(i) * cells_;
      const auto shift = static_cast<std::size_t>((cx % nx_ + nx_) % nx_);
      for (int iy = 0; iy < ny_; ++iy) {
        const int yd = ((iy + cy) % ny_ + ny_) % ny_;
        const double* row = src + static_cast<std::size_t>(iy) * unx;
        double* out = dst + static_cast<std::size_t>(yd) * unx;
        // Destination x = (x + shift) mod nx.
        std::copy(row, row + (unx - shift), out + shift);
        std::copy(row + (unx - shift), row + unx, out);
      }
    }
    populations_.swap(scratch_);
  }

private:
  static bool needsReconstruction(DynamicsTag tag) {
    return tag == DynamicsTag::ZouHeVelocity || tag == DynamicsTag::ZouHePressure ||
           tag == DynamicsTag::AdeDirichlet || tag == DynamicsTag::AdeNeumann ||
           tag == DynamicsTag::AdeAdiabatic;
  }

  Populations reconstructed(int ix, int iy) const {
    Populations pops = cell(ix, iy);
    const std::span<double> f(pops.data(), static_cast<std::size_t>(q()));
    const CellBoundary& b = boundary_[cellIndex(ix, iy)];
    switch (tags_[cellIndex(ix, iy)]) {
    case DynamicsTag::ZouHeVelocity: zouHeVelocityReconstruct(velocities_, f, b.normal, b.u); break;
    case DynamicsTag::ZouHePressure: zouHePressureReconstruct(velocities_, f, b.normal, b.rho); break;
    case DynamicsTag::AdeDirichlet:
    case DynamicsTag::AdeNeumann: adeDirichletReconstruct(velocities_, f, b.normal, b.value); break;
    case DynamicsTag::AdeAdiabatic: adeAdiabaticReconstruct(velocities_, f, b.normal); break;
    default: break;
    }
    return pops;
  }

  std::vector<double>& fieldStorage(FieldKind kind) {
    for (std::size_t k = 0; k < fieldKinds_.size(); ++k) {
      if (fieldKinds_[k] == kind) {
        return fieldData_[k];
      }
    }
    throw ValidationError("lattice has no " + std::string(fieldName(kind)) + " field");
  }
  static void checkComponent(FieldKind kind, int component) {
    if (component < 0 || component >= fieldComponents(kind)) {
      throw ValidationError("field component out of range");
    }
  }

  DescriptorTable table_;
  VelocitySet velocities_;
  int nx_;
  int ny_;
  std::size_t cells_ = 0;
  std::vector<double> populations_;
  std::vector<double> scratch_;
  std::vector<DynamicsTag> tags_;
  std::vector<CellBoundary> boundary_;
  std::vector<FieldKind> fieldKinds_;
  std::vector<std::vector<double>> fieldData_;
};

inline void stream(BlockLattice& lattice) { lattice.stream(); }

namespace detail {

// Fixed-Q copies of the bulk kernels in dynamics.hpp (same floating-point
// expressions, so results match the generic kernels bit for bit).

/// Velocity set with compile-time size and floating-point velocities.
template <int Q>
struct FixedSet {
  std::array<double, Q> cx{};
  std::array<double, Q> cy{};
  std::array<double, Q> w{};
  double invCs2 = 0.0;

  explicit FixedSet(const VelocitySet& v) : invCs2(v.invCs2) {
    for (int i = 0; i < Q; ++i) {
      cx[i] = v.cx[i];
      cy[i] = v.cy[i];
      w[i] = v.w[i];
    }
  }
};

template <int Q>
inline void bgkFixed(const FixedSet<Q>& v, double* f, double omega, const double* force) {
  double rho = 0.0;
  double jx = 0.0;
  double jy = 0.0;
  for (int i = 0; i < Q; ++i) {
    rho += f[i];
    jx += v.cx[i] * f[i];
    jy += v.cy[i] * f[i];
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw NumericalBlowup("non-positive or non-finite density");
  }
  if (force != nullptr) {
    jx += force[0] / 2.0;
    jy += force[1] / 2.0;
  }
  const std::array<double, 2> u{jx / rho, jy / rho};
  const double uu = u[0] * u[0] + u[1] * u[1];
  const double prefactor = 1.0 - 0.5 * omega;
  for (int i = 0; i < Q; ++i) {
    const double cu = v.cx[i] * u[0] + v.cy[i] * u[1];
    const double feq = v.w[i] * rho *
                       (1.0 + cu * v.invCs2 + 0.5 * cu * cu * v.invCs2 * v.invCs2 -
                        0.5 * uu * v.invCs2);
    f[i] = (1.0 - omega) * f[i] + omega * feq;
    if (force != nullptr) {
      const double ax = (v.cx[i] - u[0]) * v.invCs2 + cu * v.invCs2 * v.invCs2 * v.cx[i];
      const double ay = (v.cy[i] - u[1]) * v.invCs2 + cu * v.invCs2 * v.invCs2 * v.cy[i];
      f[i] += prefactor * v.w[i] * (ax * force[0] + ay * force[1]);
    }
  }
}

template <int Q>
inline void adeFixed(const FixedSet<Q>& v, double* g, std::array<double, 2> u, double omega) {
  double rho = 0.0;
  for (int i = 0; i < Q; ++i) {
    rho += g[i];
  }
  for (int i = 0; i < Q; ++i) {
    const double cu = v.cx[i] * u[0] + v.cy[i] * u[1];
    const double geq = v.w[i] * rho * (1.0 + cu * v.invCs2);
    g[i] = (1.0 - omega) * g[i] + omega * geq;
  }
}

template <int Q>
void collideCells(BlockLattice& lattice, const DynamicsParams& params) {
  const VelocitySet& v = lattice.velocities();
  const FixedSet<Q> fixed(v);
  const std::size_t cells = lattice.cellCount();
  const bool hasForce = lattice.hasField(FieldKind::Force);
  const bool hasVelocity = lattice.hasField(FieldKind::Velocity);
  const double omega = params.omega;
  Populations f{};
  const std::span<double> cellView(f.data(), static_cast<std::size_t>(Q));
  double* planes = lattice.populations().data();

  const double* velX = hasVelocity ? lattice.field(FieldKind::Velocity, 0).data() : nullptr;
  const double* velY = hasVelocity ? lattice.field(FieldKind::Velocity, 1).data() : nullptr;
  const double* forceX = hasForce ? lattice.field(FieldKind::Force, 0).data() : nullptr;
  const double* forceY = hasForce ? lattice.field(FieldKind::Force, 1).data() : nullptr;
  auto advection = [&](std::size_t c) -> std::array<double, 2> {
    if (velX == nullptr) {
      return {0.0, 0.0};
    }
    return {velX[c], velY[c]};
  };
  const auto tags = lattice.tags();

  for (int iy = 0; iy < lattice.ny(); ++iy) {
    for (int ix = 0; ix < lattice.nx(); ++ix) {
      const std::size_t c = lattice.cellIndex(ix, iy);
      const DynamicsTag tag = tags[c];
      if (tag == DynamicsTag::NoDynamics) {
        continue;
      }
      for (int i = 0; i < Q; ++i) {
        f[static_cast<std::size_t>(i)] = planes[static_cast<std::size_t>(i) * cells + c];
      }
      switch (tag) {
      case DynamicsTag::BGK:
        bgkFixed<Q>(fixed, f.data(), omega, nullptr);
        break;
      case DynamicsTag::ForcedBGK: {
        const std::array<double, 2> force{forceX ? forceX[c] : 0.0, forceY ? forceY[c] : 0.0};
        bgkFixed<Q>(fixed, f.data(), omega, force.data());
        break;
      }
      case DynamicsTag::AdeBGK:
        adeFixed<Q>(fixed, f.data(), advection(c), omega);
        break;
      case DynamicsTag::TRT:
        collideTRT(v, cellView, omega, params.magic);
        break;
      case DynamicsTag::BounceBack:
        applyBounceBack(v, cellView);
        break;
      case DynamicsTag::ZouHeVelocity: {
        const auto& b = lattice.boundary(ix, iy);
        applyZouHeVelocity(v, cellView, b.normal, b.u, omega);
        break;
      }
      case DynamicsTag::ZouHePressure: {
        const auto& b = lattice.boundary(ix, iy);
        applyZouHePressure(v, cellView, b.normal, b.rho, omega);
        break;
      }
      case DynamicsTag::AdeDirichlet:
      case DynamicsTag::AdeNeumann: {
        const auto& b = lattice.boundary(ix, iy);
        applyAdeDirichlet(v, cellView, b.value, b.normal, advection(c), omega);
        break;
      }
      case DynamicsTag::AdeAdiabatic: {
        const auto& b = lattice.boundary(ix, iy);
        applyAdeAdiabatic(v, cellView, b.normal, advection(c), omega);
        break;
      }
      case DynamicsTag::NoDynamics:
        break;
      }
      for (int i = 0; i < Q; ++i) {
        planes[static_cast<std::size_t>(i) * cells + c] = f[static_cast<std::size_t>(i)];
      }
    }
  }
}

} // namespace detail

/// Collision phase only: every cell is updated from its own data.
inline void collide(BlockLattice& lattice, const DynamicsParams& params) {
  switch (lattice.q()) {
  case 9: detail::collideCells<9>(lattice, params); break;
  case 5: detail::collideCells<5>(lattice, params); break;
  default: throw ValidationError("unsupported velocity count");
  }
}

/// Non-local post-step: Neumann cells refresh their wall value from the
/// interior neighbor along the normal. Reads the BOUNDARY field (flux * dx).
inline void postStream(BlockLattice& lattice) {
  const bool hasPayload = lattice.hasField(FieldKind::Boundary);
  for (int iy = 0; iy < lattice.ny(); ++iy) {
    for (int ix = 0; ix < lattice.nx(); ++ix) {
      if (lattice.tag(ix, iy) != DynamicsTag::AdeNeumann) {
        continue;
      }
      auto& b = lattice.boundary(ix, iy);
      const int jx = ix + b.normal[0];
      const int jy = iy + b.normal[1];
      if (jx < 0 || jy < 0 || jx >= lattice.nx() || jy >= lattice.ny() ||
          lattice.tag(jx, jy) == DynamicsTag::NoDynamics) {
        throw GeometryError("Neumann boundary cell without interior neighbor along its normal");
      }
      const double payload =
        hasPayload ? lattice.field(FieldKind::Boundary)[lattice.cellIndex(ix, iy)] : 0.0;
      b.value = adeNeumannWallValue(payload, lattice.density(jx, jy));
    }
  }
}

/// One time step: local collision, periodic streaming, non-local post-step.
inline void collideAndStream(BlockLattice& lattice, const DynamicsParams& params) {
  collide(lattice, params);
  lattice.stream();
  postStream(lattice);
}

// -- checkpoint ---------------------------------------------------------------
//
// Layout (all integers and floats little-endian):
//   8 bytes   magic "LBKITCK1"
//   u32       descriptor name length, then the name bytes ("D2Q9" / "D2Q5")
//   u64 nx, u64 ny
//   u32       field count, then per field: u32 name length, name bytes, u32 components
//   payload   f64 values: q population planes, then each field's component planes;
//             every plane row-major with x fastest.

namespace detail {

inline constexpr std::string_view kCheckpointMagic = "LBKITCK1";

template <typename UInt>
void writeLE(std::ostream& os, UInt value) {
  std::array<char, sizeof(UInt)> bytes{};
  for (std::size_t k = 0; k < sizeof(UInt); ++k) {
    bytes[k] = static_cast<char>((value >> (8 * k)) & 0xFFu);
  }
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

template <typename UInt>
UInt readLE(std::istream& is) {
  std::array<unsigned char, sizeof(UInt)> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!is) {
    throw IoError("truncated checkpoint");
  }
  UInt value = 0;
  for (std::size_t k = 0; k < sizeof(UInt); ++k) {
    value |= static_cast<UInt>(bytes[k]) << (8 * k);
  }
  return value;
}

inline void writeString(std::ostream& os, std::string_view s) {
  writeLE<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string readString(std::istream& is) {
  const auto n = readLE<std::uint32_t>(is);
  if (n > 4096) {
    throw IoError("corrupt checkpoint string length");
  }
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  if (!is) {
    throw IoError("truncated checkpoint");
  }
  return s;
}

inline void writeDoubles(std::ostream& os, std::span<const double> values) {
  for (double v : values) {
    writeLE<std::uint64_t>(os, std::bit_cast<std::uint64_t>(v));
  }
}

inline void readDoubles(std::istream& is, std::span<double> values) {
  for (double& v : values) {
    v = std::bit_cast<double>(readLE<std::uint64_t>(is));
  }
}

} // namespace detail

inline void saveCheckpoint(const BlockLattice& lattice, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw IoError("cannot open checkpoint '" + path + "' for writing");
  }
  os.write(detail::kCheckpointMagic.data(),
           static_cast<std::streamsize>(detail::kCheckpointMagic.size()));
  detail::writeString(os, toString(lattice.descriptor().name));
  detail::writeLE<std::uint64_t>(os, static_cast<std::uint64_t>(lattice.nx()));
  detail::writeLE<std::uint64_t>(os, static_cast<std::uint64_t>(lattice.ny()));
  detail::writeLE<std::uint32_t>(os, static_cast<std::uint32_t>(lattice.fieldKinds().size()));
  for (FieldKind kind : lattice.fieldKinds()) {
    detail::writeString(os, fieldName(kind));
    detail::writeLE<std::uint32_t>(os, static_cast<std::uint32_t>(fieldComponents(kind)));
  }
  detail::writeDoubles(os, lattice.populations());
  for (FieldKind kind : lattice.fieldKinds()) {
    detail::writeDoubles(os, lattice.fieldData(kind));
  }
  if (!os) {
    throw IoError("failed writing checkpoint '" + path + "'");
  }
}

/// Restores populations and fields into a lattice of matching descriptor,
/// shape and field list. Dynamics tags and boundary data come from the setup.
/// Expects a checkpoint written after a complete time step.
inline void loadCheckpoint(BlockLattice& lattice, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw IoError("cannot open checkpoint '" + path + "'");
  }
  std::string magic(detail::kCheckpointMagic.size(), '\0');
  is.read(magic.data(), static_cast<std::streamsize>(magic.size()));
  if (!is || magic != detail::kCheckpointMagic) {
    throw IoError("'" + path + "' is not an lbkit checkpoint");
  }
  const std::string name = detail::readString(is);
  if (name != toString(lattice.descriptor().name)) {
    throw ValidationError("checkpoint descriptor " + name + " does not match lattice");
  }
  const auto nx = detail::readLE<std::uint64_t>(is);
  const auto ny = detail::readLE<std::uint64_t>(is);
  if (nx != static_cast<std::uint64_t>(lattice.nx()) ||
      ny != static_cast<std::uint64_t>(lattice.ny())) {
    throw ValidationError("checkpoint grid size does not match lattice");
  }
  const auto fieldCount = detail::readLE<std::uint32_t>(is);
  if (fieldCount != lattice.fieldKinds().size()) {
    throw ValidationError("checkpoint field list does not match lattice");
  }
  for (FieldKind kind : lattice.fieldKinds()) {
    const std::string fname = detail::readString(is);
    const auto comps = detail::readLE<std::uint32_t>(is);
    if (fname != fieldName(kind) || comps != static_cast<std::uint32_t>(fieldComponents(kind))) {
      throw ValidationError("checkpoint field list does not match lattice");
    }
  }
  detail::readDoubles(is, lattice.populations());
  for (FieldKind kind : lattice.fieldKinds()) {
    detail::readDoubles(is, lattice.fieldData(kind));
  }
  // Neumann wall values are derived state; rebuild them as the last post-step did.
  postStream(lattice);
}

} // namespace lbkit
