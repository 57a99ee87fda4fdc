#include <gtest/gtest.h>

#include <random>

#include "lbkit/boundary.hpp"

using namespace lbkit;

namespace {

const VelocitySet& q9() {
  static const VelocitySet v(LatticeKind::D2Q9);
  return v;
}

const VelocitySet& q5() {
  static const VelocitySet v(LatticeKind::D2Q5);
  return v;
}

std::span<double> span(const VelocitySet& v, Populations& f) {
  return {f.data(), static_cast<std::size_t>(v.q)};
}

Populations randomCell(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rho(0.9, 1.1), u(-0.05, 0.05), noise(-0.1, 0.1);
  Populations f{};
  equilibriumSecondOrder(q9(), rho(rng), {u(rng), u(rng)}, span(q9(), f));
  for (int i = 0; i < 9; ++i) {
    f[i] *= 1.0 + noise(rng);
  }
  return f;
}

const std::array<IntVec2, 4> kNormals{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

} // namespace

TEST(BounceBack, SymmetricCellUnchanged) {
  Populations f{};
  equilibriumSecondOrder(q9(), 1.0, {0, 0}, span(q9(), f));
  const Populations before = f;
  applyBounceBack(q9(), span(q9(), f));
  EXPECT_EQ(f, before);
}

TEST(BounceBack, InvolutionAndMass) {
  std::mt19937_64 rng(1);
  Populations f = randomCell(rng);
  const Populations before = f;
  applyBounceBack(q9(), span(q9(), f));
  for (int i = 0; i < 9; ++i) {
    EXPECT_EQ(f[i], before[q9().opposite[i]]);
  }
  double a = 0, b = 0;
  for (int i = 0; i < 9; ++i) {
    a += f[i];
    b += before[q9().opposite[i]];
  }
  EXPECT_EQ(a, b);
  applyBounceBack(q9(), span(q9(), f));
  EXPECT_EQ(f, before);
}

TEST(ZouHe, RestCellUnchanged) {
  Populations f{};
  equilibriumSecondOrder(q9(), 1.0, {0, 0}, span(q9(), f));
  for (const auto& n : kNormals) {
    Populations g = f;
    const double rho = zouHeVelocityReconstruct(q9(), span(q9(), g), n, {0.0, 0.0});
    EXPECT_NEAR(rho, 1.0, 1e-15);
    for (int i = 0; i < 9; ++i) {
      EXPECT_NEAR(g[i], f[i], 1e-15);
    }
    Populations h = f;
    zouHePressureReconstruct(q9(), span(q9(), h), n, 1.0);
    for (int i = 0; i < 9; ++i) {
      EXPECT_NEAR(h[i], f[i], 1e-15);
    }
  }
}

TEST(ZouHe, VelocityMomentsExact) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (int k = 0; k < 500; ++k) {
    for (const auto& n : kNormals) {
      Populations f = randomCell(rng);
      const std::array<double, 2> uw{u(rng), u(rng)};
      const double rho = zouHeVelocityReconstruct(q9(), span(q9(), f), n, uw);
      const auto m = computeMoments(q9(), span(q9(), f));
      EXPECT_NEAR(m.rho, rho, 1e-13);
      EXPECT_NEAR(m.u[0], uw[0], 1e-13);
      EXPECT_NEAR(m.u[1], uw[1], 1e-13);
    }
  }
}

TEST(ZouHe, PressureDensityExact) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(0.95, 1.05);
  for (int k = 0; k < 500; ++k) {
    for (const auto& n : kNormals) {
      Populations f = randomCell(rng);
      const double rw = r(rng);
      const auto u = zouHePressureReconstruct(q9(), span(q9(), f), n, rw);
      const auto m = computeMoments(q9(), span(q9(), f));
      EXPECT_NEAR(m.rho, rw, 1e-13);
      EXPECT_NEAR(m.u[0], u[0], 1e-13);
      EXPECT_NEAR(m.u[1], u[1], 1e-13);
      // Tangential velocity is zero.
      EXPECT_NEAR(n[0] != 0 ? m.u[1] : m.u[0], 0.0, 1e-13);
    }
  }
}

TEST(ZouHe, BottomWallMatchesClassicFormulas) {
  // Hand-built cell; unknowns (cy > 0) filled with garbage.
  Populations f{0.44, 99, 0.11, 0.027, 0.12, 0.029, 0.105, 99, 99};
  const double ux = 0.1;
  const double uy = 0.0;
  const double rho = (f[0] + f[6] + f[2] + 2.0 * (f[4] + f[3] + f[5])) / (1.0 - uy);
  const double north = f[4] + 2.0 / 3.0 * rho * uy;
  const double ne = f[3] - 0.5 * (f[6] - f[2]) + 0.5 * rho * ux + rho * uy / 6.0;
  const double nw = f[5] + 0.5 * (f[6] - f[2]) - 0.5 * rho * ux + rho * uy / 6.0;
  const double got = zouHeVelocityReconstruct(q9(), span(q9(), f), {0, 1}, {ux, uy});
  EXPECT_NEAR(got, rho, 1e-15);
  EXPECT_NEAR(f[8], north, 1e-15);
  EXPECT_NEAR(f[7], ne, 1e-15);
  EXPECT_NEAR(f[1], nw, 1e-15);
}

TEST(ZouHe, Errors) {
  Populations f{};
  equilibriumSecondOrder(q9(), 1.0, {0, 0}, span(q9(), f));
  EXPECT_THROW(zouHeVelocityReconstruct(q9(), span(q9(), f), {1, 0}, {1.0, 0.0}), SingularBoundary);
  EXPECT_THROW(zouHeVelocityReconstruct(q9(), span(q9(), f), {1, 1}, {0.0, 0.0}), ValidationError);
  EXPECT_THROW(zouHePressureReconstruct(q9(), span(q9(), f), {1, 0}, 0.0), ValidationError);
  Populations g{};
  EXPECT_THROW(zouHeVelocityReconstruct(q5(), span(q5(), g), {1, 0}, {0.0, 0.0}), ValidationError);
}

TEST(ZouHe, ApplyCollides) {
  std::mt19937_64 rng(4);
  Populations f = randomCell(rng);
  Populations ref = f;
  applyZouHeVelocity(q9(), span(q9(), f), {-1, 0}, {0.02, 0.0}, 1.3);
  zouHeVelocityReconstruct(q9(), span(q9(), ref), {-1, 0}, {0.02, 0.0});
  collideBGK(q9(), span(q9(), ref), 1.3);
  EXPECT_EQ(f, ref);
  const auto m = computeMoments(q9(), span(q9(), f));
  EXPECT_NEAR(m.u[0], 0.02, 1e-13);
}

TEST(AdeDirichlet, MissingPopulation) {
  // Left wall: normal (1,0), missing g_3.
  Populations g{0.3, 0.2, 0.1, 77, 0.2};
  adeDirichletReconstruct(q5(), span(q5(), g), {1, 0}, 1.0);
  EXPECT_NEAR(g[3], 0.2, 1e-15);
  EXPECT_NEAR(g[3], 1.0 - (g[0] + g[1] + g[2] + g[4]), 0.0);
  EXPECT_NEAR(computeRho(q5(), span(q5(), g)), 1.0, 1e-15);

  Populations h{0.3, 0.2, 0.1, 0.25, 0.2};
  applyAdeDirichlet(q5(), span(q5(), h), 0.7, {0, -1}, {0.05, 0.0}, 0.8);
  EXPECT_NEAR(computeRho(q5(), span(q5(), h)), 0.7, 1e-15);
}

TEST(AdeNeumann, WallValue) {
  EXPECT_DOUBLE_EQ(adeNeumannWallValue(0.0, 0.5), 0.5);
  // Left wall, dx * flux = 0.2 along the outer normal, neighbor 0.5.
  EXPECT_DOUBLE_EQ(adeNeumannWallValue(0.2, 0.5), 0.7);
  // Right wall with a payload of the opposite sign: neighbor - 0.2.
  EXPECT_DOUBLE_EQ(adeNeumannWallValue(-0.2, 0.5), 0.3);
  Populations g{0.3, 0.2, 0.1, 0.25, 0.2};
  applyAdeNeumann(q5(), span(q5(), g), 0.2, {1, 0}, 0.5, {0.0, 0.0}, 1.0);
  EXPECT_NEAR(computeRho(q5(), span(q5(), g)), 0.7, 1e-15);
}

TEST(AdeAdiabatic, CopiesOpposite) {
  // South wall: normal (0,1), missing g_4 = g_2.
  Populations g{0.3, 0.2, 0.3, 0.1, 55};
  adeAdiabaticReconstruct(q5(), span(q5(), g), {0, 1});
  EXPECT_EQ(g[4], 0.3);
  EXPECT_DOUBLE_EQ(computeRho(q5(), span(q5(), g)), 0.3 + 0.2 + 0.3 + 0.1 + 0.3);

  Populations s{0.2, 0.2, 0.2, 0.2, 0.2};
  const Populations before = s;
  adeAdiabaticReconstruct(q5(), span(q5(), s), {-1, 0});
  EXPECT_EQ(s, before);
}
