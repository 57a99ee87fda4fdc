#include <gtest/gtest.h>

#include "lbkit/geometry.hpp"

using namespace lbkit;

TEST(Indicator, SetAlgebra) {
  const auto circle = Indicator::circle({0.3, 0.4}, 0.2);
  EXPECT_TRUE(circle.contains({0.3, 0.4}));
  const auto unit = Indicator::cuboid({0, 0}, {1, 1});
  EXPECT_FALSE(unit.contains({2, 0}));
  const auto diff = Indicator::cuboid({0, 0}, {2, 1}) - unit;
  EXPECT_FALSE(diff.contains({0.5, 0.5}));
  EXPECT_TRUE(diff.contains({1.5, 0.5}));
  const auto both = unit * Indicator::cuboid({0.5, 0.5}, {1, 1});
  EXPECT_TRUE(both.contains({0.75, 0.75}));
  EXPECT_FALSE(both.contains({0.25, 0.25}));
  const auto either = unit + Indicator::circle({3, 3}, 0.5);
  EXPECT_TRUE(either.contains({3, 3}));
  EXPECT_THROW(Indicator::circle({0, 0}, 0.0), GeometryError);
}

TEST(Geometry, BuildUnitSquare) {
  const auto g = buildGeometry(Indicator::cuboid({0, 0}, {1, 1}), 0.25);
  EXPECT_EQ(g.nx(), 4);
  EXPECT_EQ(g.ny(), 4);
  EXPECT_EQ(g.count(2), 16u);
}

TEST(Geometry, BuildWithPadding) {
  const auto g = buildGeometry(Indicator::cuboid({0, 0}, {1, 1}), 0.25, 1);
  EXPECT_EQ(g.nx(), 6);
  EXPECT_EQ(g.ny(), 6);
  EXPECT_EQ(g.count(2), 16u);
  EXPECT_EQ(g.count(0), 20u);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(g.get(i, 0), 0);
    EXPECT_EQ(g.get(0, i), 0);
    EXPECT_EQ(g.get(i, 5), 0);
    EXPECT_EQ(g.get(5, i), 0);
  }
}

TEST(Geometry, CircleMatchesBruteForce) {
  const auto circle = Indicator::circle({0.5, 0.5}, 0.5);
  const auto g = buildGeometry(Indicator::cuboid({0, 0}, {1, 1}), 0.1);
  Geometry h = g;
  h.rename(2, 3, circle);
  std::size_t expected = 0;
  for (int iy = 0; iy < g.ny(); ++iy) {
    for (int ix = 0; ix < g.nx(); ++ix) {
      const double x = 0.05 + 0.1 * ix;
      const double y = 0.05 + 0.1 * iy;
      expected += (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5) <= 0.25 ? 1 : 0;
    }
  }
  EXPECT_EQ(h.count(3), expected);

  const auto direct = buildGeometry(circle, 0.1);
  EXPECT_EQ(direct.count(2), expected);
}

TEST(Geometry, RenameVariants) {
  Geometry g(6, 5, {0, 0}, 1.0, 2);
  Geometry all = g;
  all.rename(2, 1);
  EXPECT_EQ(all.count(1), 30u);

  g.rename(2, 1, {1, 1});
  EXPECT_EQ(g.count(1), 12u);
  for (int iy = 0; iy < 5; ++iy) {
    for (int ix = 0; ix < 6; ++ix) {
      const bool ring = ix == 0 || iy == 0 || ix == 5 || iy == 4;
      EXPECT_EQ(g.get(ix, iy), ring ? 2 : 1);
    }
  }

  Geometry again = g;
  again.rename(2, 1, {1, 1});
  EXPECT_EQ(again.materials(), g.materials());
}

TEST(Geometry, RenameByNeighborMatchesScan) {
  Geometry g(6, 5, {0, 0}, 1.0, 2);
  g.rename(2, 1, {1, 1});
  Geometry scan = g;
  g.rename(2, 3, 1, {1, 0});
  for (int iy = 0; iy < 5; ++iy) {
    for (int ix = 0; ix < 6; ++ix) {
      int expected = scan.get(ix, iy);
      if (expected == 2 && scan.getOrOutside(ix + 1, iy) == 1 && scan.getOrOutside(ix + 2, iy) == 1) {
        expected = 3;
      }
      EXPECT_EQ(g.get(ix, iy), expected);
    }
  }
  // Left wall minus its corners.
  EXPECT_EQ(g.count(3), 3u);
  for (int iy = 1; iy < 4; ++iy) {
    EXPECT_EQ(g.get(0, iy), 3);
  }

  Geometry twice = g;
  twice.rename(2, 3, 1, {1, 0});
  EXPECT_EQ(twice.materials(), g.materials());
}

TEST(Geometry, RenameByNeighborWithIndicator) {
  Geometry g(6, 6, {0, 0}, 1.0, 2);
  g.rename(2, 1, {1, 1});
  g.rename(2, 3, 1, {1, 0}, Indicator::cuboid({-0.5, -0.5}, {1, 2.9}));
  EXPECT_EQ(g.count(3), 2u);
  EXPECT_EQ(g.get(0, 1), 3);
  EXPECT_EQ(g.get(0, 2), 3);
  EXPECT_EQ(g.get(0, 3), 2);
}

TEST(Geometry, MaterialIndicator) {
  Geometry g(4, 3, {0, 0}, 1.0, 1);
  EXPECT_EQ(materialIndicator(g, {1}).count(), 12u);
  EXPECT_EQ(materialIndicator(g, {}).count(), 0u);
  g.set(0, 0, 2);
  g.set(1, 0, 3);
  g.set(2, 0, 3);
  const auto m = materialIndicator(g, {2, 3});
  EXPECT_EQ(m.count(), g.count(2) + g.count(3));
  EXPECT_TRUE(m(1, 0));
  EXPECT_FALSE(m(3, 2));
}

TEST(Geometry, Errors) {
  EXPECT_THROW(Geometry(0, 3, {0, 0}, 1.0), GeometryError);
  EXPECT_THROW(Geometry(3, 3, {0, 0}, 0.0), GeometryError);
  Geometry g(3, 3, {0, 0}, 1.0);
  EXPECT_THROW(g.set(0, 0, 256), ValidationError);
  EXPECT_THROW(g.get(3, 0), GeometryError);
  EXPECT_EQ(g.getOrOutside(-1, 0), -1);
}
