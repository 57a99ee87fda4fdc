#include <gtest/gtest.h>

#include <random>

#include "lbkit/dynamics.hpp"

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

/// Equilibrium plus a bounded random perturbation; always positive.
Populations randomCell(const VelocitySet& v, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rho(0.8, 1.2);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  std::uniform_real_distribution<double> noise(-0.2, 0.2);
  Populations f{};
  equilibriumSecondOrder(v, rho(rng), {u(rng), u(rng)}, span(v, f));
  for (int i = 0; i < v.q; ++i) {
    f[i] *= 1.0 + noise(rng);
  }
  return f;
}

std::array<double, 3> sums(const VelocitySet& v, const Populations& f) {
  std::array<double, 3> s{0, 0, 0};
  for (int i = 0; i < v.q; ++i) {
    s[0] += f[i];
    s[1] += v.cx[i] * f[i];
    s[2] += v.cy[i] * f[i];
  }
  return s;
}

} // namespace

TEST(Equilibrium, RestStateIsWeights) {
  for (const VelocitySet* v : {&q9(), &q5()}) {
    Populations a{}, b{};
    equilibriumSecondOrder(*v, 1.0, {0, 0}, span(*v, a));
    equilibriumFirstOrder(*v, 1.0, {0, 0}, span(*v, b));
    for (int i = 0; i < v->q; ++i) {
      EXPECT_DOUBLE_EQ(a[i], v->w[i]);
      EXPECT_DOUBLE_EQ(b[i], v->w[i]);
    }
  }
}

TEST(Equilibrium, HandValues) {
  Populations f{};
  equilibriumSecondOrder(q9(), 1.0, {0.1, 0.0}, span(q9(), f));
  EXPECT_NEAR(f[6], (1.0 / 9.0) * (1.0 + 0.3 + 0.045 - 0.015), 1e-15);
  EXPECT_NEAR(f[6], 0.147777777777777, 1e-14);
  Populations g{};
  equilibriumFirstOrder(q5(), 2.0, {0.1, 0.0}, span(q5(), g));
  EXPECT_NEAR(g[3], 0.4333333333333333, 1e-15);
}

TEST(Equilibrium, MomentIdentities) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> r(0.5, 1.5), u(-0.2, 0.2);
  for (int k = 0; k < 100; ++k) {
    const double rho = r(rng);
    const std::array<double, 2> vel{u(rng), u(rng)};
    for (const VelocitySet* v : {&q9(), &q5()}) {
      Populations f{};
      if (v->q == 9) {
        equilibriumSecondOrder(*v, rho, vel, span(*v, f));
      } else {
        equilibriumFirstOrder(*v, rho, vel, span(*v, f));
      }
      const auto s = sums(*v, f);
      EXPECT_NEAR(s[0], rho, 1e-14);
      EXPECT_NEAR(s[1], rho * vel[0], 1e-14);
      EXPECT_NEAR(s[2], rho * vel[1], 1e-14);
    }
  }
}

TEST(Moments, RestAndInverse) {
  Populations f{};
  equilibriumSecondOrder(q9(), 1.0, {0, 0}, span(q9(), f));
  auto m = computeMoments(q9(), span(q9(), f));
  EXPECT_NEAR(m.rho, 1.0, 1e-15);
  EXPECT_NEAR(m.u[0], 0.0, 1e-15);

  equilibriumSecondOrder(q9(), 1.2, {0.05, -0.02}, span(q9(), f));
  m = computeMoments(q9(), span(q9(), f));
  EXPECT_NEAR(m.rho, 1.2, 1e-14);
  EXPECT_NEAR(m.u[0], 0.05, 1e-14);
  EXPECT_NEAR(m.u[1], -0.02, 1e-14);
}

TEST(Moments, ForcedShiftIsHalfForce) {
  Populations f{};
  equilibriumSecondOrder(q9(), 1.0, {0, 0}, span(q9(), f));
  const double force[2] = {0.01, 0.0};
  const auto m = computeMoments(q9(), span(q9(), f), force);
  EXPECT_NEAR(m.u[0], 0.005, 1e-16);
  EXPECT_NEAR(m.u[1], 0.0, 1e-16);
}

TEST(Moments, NonPositiveDensityThrows) {
  Populations f{};
  EXPECT_THROW(computeMoments(q9(), span(q9(), f)), NumericalBlowup);
  f[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(computeMoments(q9(), span(q9(), f)), NumericalBlowup);
}

TEST(BGK, EquilibriumIsFixedPoint) {
  Populations f{};
  equilibriumSecondOrder(q9(), 1.1, {0.03, 0.01}, span(q9(), f));
  const Populations before = f;
  collideBGK(q9(), span(q9(), f), 1.7);
  for (int i = 0; i < 9; ++i) {
    EXPECT_NEAR(f[i], before[i], 1e-15);
  }
}

TEST(BGK, OmegaOneGivesEquilibrium) {
  std::mt19937_64 rng(3);
  Populations f = randomCell(q9(), rng);
  const auto m = computeMoments(q9(), span(q9(), f));
  Populations feq{};
  equilibriumSecondOrder(q9(), m.rho, m.u, span(q9(), feq));
  collideBGK(q9(), span(q9(), f), 1.0);
  for (int i = 0; i < 9; ++i) {
    EXPECT_DOUBLE_EQ(f[i], feq[i]);
  }
}

TEST(BGK, Conservation) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 1000; ++k) {
    Populations f = randomCell(q9(), rng);
    const auto before = sums(q9(), f);
    collideBGK(q9(), span(q9(), f), 1.7);
    const auto after = sums(q9(), f);
    for (int a = 0; a < 3; ++a) {
      EXPECT_NEAR(after[a], before[a], 1e-13);
    }
  }
}

TEST(TRT, DegeneratesToBGK) {
  std::mt19937_64 rng(5);
  const double omega = 1.3;
  // magic = (1/omega - 1/2)^2 makes omega- equal omega.
  const double magic = (1.0 / omega - 0.5) * (1.0 / omega - 0.5);
  EXPECT_NEAR(trtOmegaMinus(omega, magic), omega, 1e-14);
  Populations a = randomCell(q9(), rng);
  Populations b = a;
  collideBGK(q9(), span(q9(), a), omega);
  collideTRT(q9(), span(q9(), b), omega, magic);
  for (int i = 0; i < 9; ++i) {
    EXPECT_NEAR(a[i], b[i], 1e-15);
  }
}

TEST(TRT, EquilibriumFixedPointAndConservation) {
  Populations f{};
  equilibriumSecondOrder(q9(), 0.9, {-0.04, 0.02}, span(q9(), f));
  const Populations eq = f;
  collideTRT(q9(), span(q9(), f), 1.6, 0.25);
  for (int i = 0; i < 9; ++i) {
    EXPECT_NEAR(f[i], eq[i], 1e-15);
  }
  std::mt19937_64 rng(13);
  for (int k = 0; k < 1000; ++k) {
    Populations g = randomCell(q9(), rng);
    const auto before = sums(q9(), g);
    collideTRT(q9(), span(q9(), g), 1.6, 0.25);
    const auto after = sums(q9(), g);
    for (int a = 0; a < 3; ++a) {
      EXPECT_NEAR(after[a], before[a], 1e-13);
    }
  }
}

TEST(Guo, ZeroForceIsNoOp) {
  std::mt19937_64 rng(17);
  Populations f = randomCell(q9(), rng);
  const Populations before = f;
  applyGuoForce(q9(), span(q9(), f), {0.05, 0.01}, 1.2, {0.0, 0.0});
  for (int i = 0; i < 9; ++i) {
    EXPECT_EQ(f[i], before[i]);
  }
}

TEST(Guo, SourceMoments) {
  Populations s{};
  guoSource(q9(), {0.0, 0.0}, 1.0, {0.01, 0.0}, span(q9(), s));
  const auto m = sums(q9(), s);
  EXPECT_NEAR(m[0], 0.0, 1e-15);
  EXPECT_NEAR(m[1], 0.005, 1e-15);
  EXPECT_NEAR(m[2], 0.0, 1e-15);

  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-0.1, 0.1), w(0.1, 1.9), F(-0.01, 0.01);
  for (int k = 0; k < 1000; ++k) {
    const double omega = w(rng);
    const std::array<double, 2> force{F(rng), F(rng)};
    guoSource(q9(), {u(rng), u(rng)}, omega, force, span(q9(), s));
    const auto t = sums(q9(), s);
    EXPECT_NEAR(t[0], 0.0, 1e-15);
    EXPECT_NEAR(t[1], (1.0 - omega / 2.0) * force[0], 1e-14);
    EXPECT_NEAR(t[2], (1.0 - omega / 2.0) * force[1], 1e-14);
  }
}

TEST(Guo, ForcedCollisionAddsForceToMomentum) {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 200; ++k) {
    Populations f = randomCell(q9(), rng);
    const auto before = sums(q9(), f);
    collideForcedBGK(q9(), span(q9(), f), 1.4, {0.003, -0.002});
    const auto after = sums(q9(), f);
    EXPECT_NEAR(after[0], before[0], 1e-13);
    EXPECT_NEAR(after[1], before[1] + 0.003, 1e-13);
    EXPECT_NEAR(after[2], before[2] - 0.002, 1e-13);
  }
}

TEST(AdeBGK, ConservesScalarAndRelaxes) {
  Populations g{0.1, 0.3, 0.2, 0.15, 0.25};
  const double before = computeRho(q5(), span(q5(), g));
  const double rho = collideAdeBGK(q5(), span(q5(), g), {0.1, 0.0}, 1.0);
  EXPECT_DOUBLE_EQ(rho, before);
  EXPECT_NEAR(computeRho(q5(), span(q5(), g)), before, 1e-15);
  Populations geq{};
  equilibriumFirstOrder(q5(), before, {0.1, 0.0}, span(q5(), geq));
  for (int i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(g[i], geq[i]);
  }
}

TEST(DynamicsParams, Validation) {
  EXPECT_NO_THROW((DynamicsParams{1.0, 0.25}.validate()));
  EXPECT_THROW((DynamicsParams{2.0, 0.25}.validate()), StabilityError);
  EXPECT_THROW((DynamicsParams{1.0, 0.0}.validate()), ValidationError);
}
