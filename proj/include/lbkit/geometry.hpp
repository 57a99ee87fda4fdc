#pragma once

// Indicator primitives and the material-number grid.
//
// Material numbers: 0 exterior, 1 fluid, >= 2 boundaries. A cell's physical
// position is its center, origin + dx * (ix, iy).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lbkit/error.hpp"

namespace lbkit {

using Vec2 = std::array<double, 2>;

struct BoundingBox {
  Vec2 min;
  Vec2 max;
};

class Indicator {
public:
  static Indicator cuboid(Vec2 origin, Vec2 extent) {
    if (!(extent[0] > 0) || !(extent[1] > 0)) {
      throw GeometryError("cuboid extent must be positive");
    }
    return Indicator(std::make_shared<const Node>(Node{Cuboid{origin, extent}}));
  }

  static Indicator circle(Vec2 center, double radius) {
    if (!(radius > 0)) {
      throw GeometryError("circle radius must be positive");
    }
    return Indicator(std::make_shared<const Node>(Node{Circle{center, radius}}));
  }

  /// Closed-set membership.
  bool contains(Vec2 p) const {
    return std::visit([&](const auto& shape) { return shape.contains(p); }, node_->shape);
  }

  BoundingBox boundingBox() const {
    return std::visit([](const auto& shape) { return shape.box(); }, node_->shape);
  }

  /// Union.
  friend Indicator operator+(const Indicator& a, const Indicator& b) {
    return Indicator(std::make_shared<const Node>(Node{Union{share(a), share(b)}}));
  }
  /// Difference, a and not b.
  friend Indicator operator-(const Indicator& a, const Indicator& b) {
    return Indicator(std::make_shared<const Node>(Node{Difference{share(a), share(b)}}));
  }
  /// Intersection.
  friend Indicator operator*(const Indicator& a, const Indicator& b) {
    return Indicator(std::make_shared<const Node>(Node{Intersection{share(a), share(b)}}));
  }

private:
  struct Cuboid {
    Vec2 origin;
    Vec2 extent;
    bool contains(Vec2 p) const {
      return p[0] >= origin[0] && p[0] <= origin[0] + extent[0] && p[1] >= origin[1] &&
             p[1] <= origin[1] + extent[1];
    }
    BoundingBox box() const { return {origin, {origin[0] + extent[0], origin[1] + extent[1]}}; }
  };
  struct Circle {
    Vec2 center;
    double radius;
    bool contains(Vec2 p) const {
      const double dx = p[0] - center[0];
      const double dy = p[1] - center[1];
      return dx * dx + dy * dy <= radius * radius;
    }
    BoundingBox box() const {
      return {{center[0] - radius, center[1] - radius}, {center[0] + radius, center[1] + radius}};
    }
  };
  struct Union {
    std::shared_ptr<const Indicator> left, right;
    bool contains(Vec2 p) const { return left->contains(p) || right->contains(p); }
    BoundingBox box() const {
      const auto a = left->boundingBox();
      const auto b = right->boundingBox();
      return {{std::min(a.min[0], b.min[0]), std::min(a.min[1], b.min[1])},
              {std::max(a.max[0], b.max[0]), std::max(a.max[1], b.max[1])}};
    }
  };
  struct Intersection {
    std::shared_ptr<const Indicator> left, right;
    bool contains(Vec2 p) const { return left->contains(p) && right->contains(p); }
    BoundingBox box() const {
      const auto a = left->boundingBox();
      const auto b = right->boundingBox();
      return {{std::max(a.min[0], b.min[0]), std::max(a.min[1], b.min[1])},
              {std::min(a.max[0], b.max[0]), std::min(a.max[1], b.max[1])}};
    }
  };
  struct Difference {
    std::shared_ptr<const Indicator> left, right;
    bool contains(Vec2 p) const { return left->contains(p) && !right->contains(p); }
    BoundingBox box() const { return left->boundingBox(); }
  };
  struct Node {
    std::variant<Cuboid, Circle, Union, Intersection, Difference> shape;
  };

  static std::shared_ptr<const Indicator> share(const Indicator& i) {
    return std::make_shared<const Indicator>(i);
  }

  explicit Indicator(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

inline bool indicatorContains(const Indicator& indicator, Vec2 p) {
  return indicator.contains(p);
}

using Material = std::uint8_t;

inline Material checkedMaterial(int m) {
  if (m < 0 || m > 255) {
    throw ValidationError("material number " + std::to_string(m) + " outside [0,255]");
  }
  return static_cast<Material>(m);
}

class Geometry {
public:
  Geometry(int nx, int ny, Vec2 origin, double deltaX, int fill = 0)
    : nx_(nx), ny_(ny), origin_(origin), deltaX_(deltaX),
      materials_(static_cast<std::size_t>(std::max(nx, 0)) * static_cast<std::size_t>(std::max(ny, 0)),
                 checkedMaterial(fill)) {
    if (nx < 1 || ny < 1) {
      throw GeometryError("geometry needs at least one cell per axis");
    }
    if (!(deltaX > 0)) {
      throw GeometryError("deltaX must be positive");
    }
  }

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  Vec2 origin() const noexcept { return origin_; }
  double deltaX() const noexcept { return deltaX_; }

  bool inside(int ix, int iy) const noexcept { return ix >= 0 && iy >= 0 && ix < nx_ && iy < ny_; }

  Material get(int ix, int iy) const { return materials_[index(ix, iy)]; }
  void set(int ix, int iy, int material) { materials_[index(ix, iy)] = checkedMaterial(material); }

  /// Material of (ix, iy), or -1 outside the grid.
  int getOrOutside(int ix, int iy) const { return inside(ix, iy) ? get(ix, iy) : -1; }

  Vec2 physPosition(int ix, int iy) const noexcept {
    return {origin_[0] + deltaX_ * ix, origin_[1] + deltaX_ * iy};
  }

  std::size_t count(int material) const {
    return static_cast<std::size_t>(
      std::count(materials_.begin(), materials_.end(), checkedMaterial(material)));
  }

  const std::vector<Material>& materials() const noexcept { return materials_; }

  /// Every fromM cell becomes toM.
  void rename(int fromM, int toM) {
    const Material from = checkedMaterial(fromM);
    const Material to = checkedMaterial(toM);
    std::replace(materials_.begin(), materials_.end(), from, to);
  }

  /// fromM -> toM where every cell of the (2 ox + 1) x (2 oy + 1) box around the
  /// cell is fromM or toM. Cells whose box leaves the grid are kept.
  void rename(int fromM, int toM, std::array<int, 2> offset) {
    const Material from = checkedMaterial(fromM);
    const Material to = checkedMaterial(toM);
    if (offset[0] < 0 || offset[1] < 0) {
      throw ValidationError("rename offset must be non-negative");
    }
    const auto snapshot = materials_;
    auto at = [&](int x, int y) {
      return snapshot[static_cast<std::size_t>(y) * static_cast<std::size_t>(nx_) +
                      static_cast<std::size_t>(x)];
    };
    for (int iy = 0; iy < ny_; ++iy) {
      for (int ix = 0; ix < nx_; ++ix) {
        if (at(ix, iy) != from) {
          continue;
        }
        bool ok = true;
        for (int dy = -offset[1]; dy <= offset[1] && ok; ++dy) {
          for (int dx = -offset[0]; dx <= offset[0] && ok; ++dx) {
            const int x = ix + dx;
            const int y = iy + dy;
            ok = inside(x, y) && (at(x, y) == from || at(x, y) == to);
          }
        }
        if (ok) {
          materials_[index(ix, iy)] = to;
        }
      }
    }
  }

  /// fromM -> toM where the cell center satisfies the indicator.
  void rename(int fromM, int toM, const Indicator& condition) {
    const Material from = checkedMaterial(fromM);
    const Material to = checkedMaterial(toM);
    for (int iy = 0; iy < ny_; ++iy) {
      for (int ix = 0; ix < nx_; ++ix) {
        auto& m = materials_[index(ix, iy)];
        if (m == from && condition.contains(physPosition(ix, iy))) {
          m = to;
        }
      }
    }
  }

  /// fromM -> toM where the cells one and two steps along testDirection are testM.
  void rename(int fromM, int toM, int testM, std::array<int, 2> testDirection) {
    const Material from = checkedMaterial(fromM);
    const Material to = checkedMaterial(toM);
    const Material test = checkedMaterial(testM);
    if (testDirection[0] == 0 && testDirection[1] == 0) {
      throw ValidationError("rename test direction must be nonzero");
    }
    const auto snapshot = materials_;
    auto at = [&](int x, int y) -> int {
      if (!inside(x, y)) {
        return -1;
      }
      return snapshot[static_cast<std::size_t>(y) * static_cast<std::size_t>(nx_) +
                      static_cast<std::size_t>(x)];
    };
    for (int iy = 0; iy < ny_; ++iy) {
      for (int ix = 0; ix < nx_; ++ix) {
        if (at(ix, iy) != from) {
          continue;
        }
        if (at(ix + testDirection[0], iy + testDirection[1]) == test &&
            at(ix + 2 * testDirection[0], iy + 2 * testDirection[1]) == test) {
          materials_[index(ix, iy)] = to;
        }
      }
    }
  }

  /// Same as above, restricted to cells whose center satisfies the indicator.
  void rename(int fromM, int toM, int testM, std::array<int, 2> testDirection,
              const Indicator& condition) {
    const auto before = materials_;
    rename(fromM, toM, testM, testDirection);
    for (int iy = 0; iy < ny_; ++iy) {
      for (int ix = 0; ix < nx_; ++ix) {
        if (!condition.contains(physPosition(ix, iy))) {
          materials_[index(ix, iy)] = before[index(ix, iy)];
        }
      }
    }
  }

private:
  std::size_t index(int ix, int iy) const {
    if (!inside(ix, iy)) {
      throw GeometryError("cell (" + std::to_string(ix) + "," + std::to_string(iy) +
                          ") outside the grid");
    }
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(ix);
  }

  int nx_;
  int ny_;
  Vec2 origin_;
  double deltaX_;
  std::vector<Material> materials_;
};

/// Voxelizes an indicator: cells whose centers lie inside get material 2, the
/// rest 0. The grid covers the bounding box plus `padding` cells on each side.
inline Geometry buildGeometry(const Indicator& domain, double deltaX, int padding = 0) {
  if (!(deltaX > 0)) {
    throw GeometryError("deltaX must be positive");
  }
  if (padding < 0) {
    throw GeometryError("padding must be non-negative");
  }
  const auto box = domain.boundingBox();
  const double ex = box.max[0] - box.min[0];
  const double ey = box.max[1] - box.min[1];
  if (!(ex > 0) || !(ey > 0)) {
    throw GeometryError("indicator has an empty bounding box");
  }
  // Small slack so that extents that are exact multiples of dx do not gain a cell.
  const int cellsX = std::max(1, static_cast<int>(std::ceil(ex / deltaX - 1e-9)));
  const int cellsY = std::max(1, static_cast<int>(std::ceil(ey / deltaX - 1e-9)));
  const Vec2 origin{box.min[0] + 0.5 * deltaX - padding * deltaX,
                    box.min[1] + 0.5 * deltaX - padding * deltaX};
  Geometry geo(cellsX + 2 * padding, cellsY + 2 * padding, origin, deltaX, 0);
  geo.rename(0, 2, domain);
  if (geo.count(2) == 0) {
    throw GeometryError("indicator contains no cell center at this resolution");
  }
  return geo;
}

/// Cell predicate selecting a set of material numbers.
class MaterialIndicator {
public:
  MaterialIndicator(const Geometry& geometry, std::set<int> materials)
    : geometry_(&geometry) {
    for (int m : materials) {
      selected_[checkedMaterial(m)] = true;
    }
  }

  bool operator()(int ix, int iy) const { return selected_[geometry_->get(ix, iy)]; }

  std::size_t count() const {
    std::size_t n = 0;
    for (Material m : geometry_->materials()) {
      n += selected_[m] ? 1 : 0;
    }
    return n;
  }

  const Geometry& geometry() const noexcept { return *geometry_; }

private:
  const Geometry* geometry_;
  std::array<bool, 256> selected_{};
};

inline MaterialIndicator materialIndicator(const Geometry& geometry, std::set<int> materials) {
  return MaterialIndicator(geometry, std::move(materials));
}

} // namespace lbkit
