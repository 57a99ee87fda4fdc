#include <gtest/gtest.h>

#include <random>

#include "lbkit/coupling.hpp"

using namespace lbkit;

namespace {

struct Pair {
  BlockLattice nse{LatticeKind::D2Q9, 5, 4, {FieldKind::Force}};
  BlockLattice ade{LatticeKind::D2Q5, 5, 4, {FieldKind::Velocity}};

  Pair() {
    for (int iy = 0; iy < 4; ++iy) {
      for (int ix = 0; ix < 5; ++ix) {
        nse.setTag(ix, iy, DynamicsTag::BGK);
        ade.setTag(ix, iy, DynamicsTag::AdeBGK);
        nse.defineEquilibrium(ix, iy, 1.0, {0, 0});
        ade.defineAdeEquilibrium(ix, iy, 0.0, {0, 0});
      }
    }
  }
};

} // namespace

TEST(CoupleVelocity, RestFlowGivesZero) {
  Pair p;
  p.ade.fillVectorField(FieldKind::Velocity, {9.0, 9.0});
  coupleVelocity(p.nse, p.ade);
  for (double v : p.ade.fieldData(FieldKind::Velocity)) {
    EXPECT_NEAR(v, 0.0, 1e-16);
  }
}

TEST(CoupleVelocity, UniformFlow) {
  Pair p;
  for (int iy = 0; iy < 4; ++iy) {
    for (int ix = 0; ix < 5; ++ix) {
      p.nse.defineEquilibrium(ix, iy, 1.0, {0.05, 0.0});
    }
  }
  coupleVelocity(p.nse, p.ade);
  for (int iy = 0; iy < 4; ++iy) {
    for (int ix = 0; ix < 5; ++ix) {
      const auto u = p.ade.vectorField(FieldKind::Velocity, ix, iy);
      EXPECT_NEAR(u[0], 0.05, 1e-14);
      EXPECT_NEAR(u[1], 0.0, 1e-14);
    }
  }
}

TEST(CoupleVelocity, RandomFlowMatchesMoments) {
  Pair p;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> r(0.9, 1.1), u(-0.08, 0.08), noise(-0.1, 0.1);
  for (int iy = 0; iy < 4; ++iy) {
    for (int ix = 0; ix < 5; ++ix) {
      p.nse.defineEquilibrium(ix, iy, r(rng), {u(rng), u(rng)});
      auto f = p.nse.cell(ix, iy);
      for (int i = 0; i < 9; ++i) {
        f[i] *= 1.0 + noise(rng);
      }
      p.nse.setCell(ix, iy, f);
    }
  }
  p.nse.setTag(2, 2, DynamicsTag::ForcedBGK);
  p.nse.setVectorField(FieldKind::Force, 2, 2, {0.01, -0.02});
  p.nse.setTag(0, 0, DynamicsTag::ZouHeVelocity);
  p.nse.boundary(0, 0).normal = {1, 0};
  p.nse.boundary(0, 0).u = {0.03, 0.0};
  p.nse.setTag(4, 3, DynamicsTag::BounceBack);
  p.ade.setVectorField(FieldKind::Velocity, 4, 3, {5.0, 5.0});
  coupleVelocity(p.nse, p.ade);
  const VelocitySet& v = p.nse.velocities();
  for (int iy = 0; iy < 4; ++iy) {
    for (int ix = 0; ix < 5; ++ix) {
      const auto got = p.ade.vectorField(FieldKind::Velocity, ix, iy);
      std::array<double, 2> expected{};
      if (ix == 4 && iy == 3) {
        expected = {5.0, 5.0};
      } else if (ix == 0 && iy == 0) {
        expected = {0.03, 0.0};
      } else {
        const auto f = p.nse.cell(ix, iy);
        double rho = 0, jx = 0, jy = 0;
        for (int i = 0; i < 9; ++i) {
          rho += f[i];
          jx += v.cx[i] * f[i];
          jy += v.cy[i] * f[i];
        }
        if (ix == 2 && iy == 2) {
          jx += 0.005;
          jy -= 0.01;
        }
        expected = {jx / rho, jy / rho};
      }
      EXPECT_NEAR(got[0], expected[0], 1e-14);
      EXPECT_NEAR(got[1], expected[1], 1e-14);
    }
  }
}

TEST(CoupleBoussinesq, ForceFormula) {
  Pair p;
  const BoussinesqParams params{9.81, 0.5, 2.0, {0.0, 1.0}};
  for (int iy = 0; iy < 4; ++iy) {
    for (int ix = 0; ix < 5; ++ix) {
      p.ade.defineAdeEquilibrium(ix, iy, 0.5, {0, 0});
    }
  }
  coupleBoussinesq(p.nse, p.ade, params);
  for (double f : p.nse.fieldData(FieldKind::Force)) {
    EXPECT_NEAR(f, 0.0, 1e-15);
  }

  p.ade.defineAdeEquilibrium(1, 1, 2.5, {0, 0});
  coupleBoussinesq(p.nse, p.ade, params);
  const auto f = p.nse.vectorField(FieldKind::Force, 1, 1);
  EXPECT_NEAR(f[0], 0.0, 1e-15);
  EXPECT_NEAR(f[1], 9.81, 1e-13);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> T(0.0, 1.0), r(0.9, 1.1);
  for (int iy = 0; iy < 4; ++iy) {
    for (int ix = 0; ix < 5; ++ix) {
      p.ade.defineAdeEquilibrium(ix, iy, T(rng), {0, 0});
      p.nse.defineEquilibrium(ix, iy, r(rng), {0, 0});
    }
  }
  const BoussinesqParams tilted{2.0, 0.3, 0.7, {0.6, -0.8}};
  coupleBoussinesq(p.nse, p.ade, tilted);
  for (int iy = 0; iy < 4; ++iy) {
    for (int ix = 0; ix < 5; ++ix) {
      const double s = 2.0 * p.nse.density(ix, iy) * (p.ade.density(ix, iy) - 0.3) / 0.7;
      const auto got = p.nse.vectorField(FieldKind::Force, ix, iy);
      EXPECT_NEAR(got[0], s * 0.6, 1e-14);
      EXPECT_NEAR(got[1], -s * 0.8, 1e-14);
    }
  }
}

TEST(CoupleBoussinesq, Linearity) {
  Pair p;
  const BoussinesqParams params{1.0, 0.0, 1.0, {0.0, 1.0}};
  p.ade.defineAdeEquilibrium(3, 2, 0.25, {0, 0});
  coupleBoussinesq(p.nse, p.ade, params);
  const double once = p.nse.vectorField(FieldKind::Force, 3, 2)[1];
  p.ade.defineAdeEquilibrium(3, 2, 0.5, {0, 0});
  coupleBoussinesq(p.nse, p.ade, params);
  EXPECT_EQ(p.nse.vectorField(FieldKind::Force, 3, 2)[1], 2.0 * once);
}

TEST(Coupling, Errors) {
  BlockLattice nse(LatticeKind::D2Q9, 3, 3, {FieldKind::Force});
  BlockLattice ade(LatticeKind::D2Q5, 4, 3, {FieldKind::Velocity});
  EXPECT_THROW(coupleVelocity(nse, ade), ValidationError);
  EXPECT_THROW(coupleBoussinesq(nse, ade, {}), ValidationError);
  BlockLattice same(LatticeKind::D2Q5, 3, 3, {FieldKind::Velocity});
  EXPECT_THROW(coupleBoussinesq(nse, same, {1.0, 0.0, 0.0, {0, 1}}), ValidationError);
  EXPECT_THROW(coupleBoussinesq(nse, same, {1.0, 0.0, 1.0, {1, 1}}), ValidationError);
}
