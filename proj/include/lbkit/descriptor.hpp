#pragma once

// Velocity-set constants for the 2D lattices (D2Q9 flow, D2Q5 advection-diffusion).
//
// Weights and cs^2 are exact rationals so the moment identities can be checked
// without rounding. Lattices convert them to floating point once, at
// construction, through VelocitySet.

#include <array>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "lbkit/error.hpp"

namespace lbkit {

class Fraction {
public:
  constexpr Fraction() = default;
  constexpr Fraction(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den) {
    if (den_ == 0) {
      throw ValidationError("fraction with zero denominator");
    }
    normalize();
  }

  constexpr std::int64_t num() const noexcept { return num_; }
  constexpr std::int64_t den() const noexcept { return den_; }
  constexpr double value() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend constexpr Fraction operator+(Fraction a, Fraction b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend constexpr Fraction operator-(Fraction a, Fraction b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
  }
  friend constexpr Fraction operator*(Fraction a, Fraction b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend constexpr bool operator==(Fraction a, Fraction b) = default;

private:
  constexpr void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

enum class LatticeKind { D2Q9, D2Q5 };

inline std::string_view toString(LatticeKind kind) {
  switch (kind) {
  case LatticeKind::D2Q9: return "D2Q9";
  case LatticeKind::D2Q5: return "D2Q5";
  }
  return "unknown";
}

inline LatticeKind latticeKindFromString(std::string_view name) {
  if (name == "D2Q9") {
    return LatticeKind::D2Q9;
  }
  if (name == "D2Q5") {
    return LatticeKind::D2Q5;
  }
  throw ValidationError("unsupported lattice descriptor '" + std::string(name) +
                        "' (supported: D2Q9, D2Q5)");
}

using IntVec2 = std::array<int, 2>;

struct DescriptorTable {
  LatticeKind name = LatticeKind::D2Q9;
  int d = 2;
  int q = 0;
  std::vector<IntVec2> c;
  std::vector<Fraction> w;
  std::vector<int> opposite;
  Fraction cs2;
  int vicinity = 1;

  friend bool operator==(const DescriptorTable&, const DescriptorTable&) = default;
};

inline DescriptorTable descriptorData(LatticeKind name) {
  switch (name) {
  case LatticeKind::D2Q9:
    return DescriptorTable{
      LatticeKind::D2Q9,
      2,
      9,
      {{0, 0}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}},
      {{4, 9}, {1, 36}, {1, 9}, {1, 36}, {1, 9}, {1, 36}, {1, 9}, {1, 36}, {1, 9}},
      {0, 5, 6, 7, 8, 1, 2, 3, 4},
      {1, 3},
      1};
  case LatticeKind::D2Q5:
    // Standard isotropic BGK set for advection-diffusion.
    return DescriptorTable{LatticeKind::D2Q5,
                           2,
                           5,
                           {{0, 0}, {-1, 0}, {0, -1}, {1, 0}, {0, 1}},
                           {{1, 3}, {1, 6}, {1, 6}, {1, 6}, {1, 6}},
                           {0, 3, 4, 1, 2},
                           {1, 3},
                           1};
  }
  throw ValidationError("unsupported lattice descriptor");
}

inline DescriptorTable descriptorData(std::string_view name) {
  return descriptorData(latticeKindFromString(name));
}

struct DescriptorViolation {
  std::string identity;
  std::string detail;
};

/// Checks the moment identities and structural invariants in exact arithmetic.
/// An empty result means the table is consistent.
inline std::vector<DescriptorViolation> validateDescriptor(const DescriptorTable& table) {
  std::vector<DescriptorViolation> report;
  const auto q = static_cast<std::size_t>(table.q);
  if (table.q <= 0 || table.c.size() != q || table.w.size() != q || table.opposite.size() != q) {
    report.push_back({"shape", "c, w and opposite must all have q entries"});
    return report;
  }

  Fraction wsum{0};
  std::array<Fraction, 2> first{Fraction{0}, Fraction{0}};
  std::array<std::array<Fraction, 2>, 2> second{};
  for (std::size_t i = 0; i < q; ++i) {
    wsum = wsum + table.w[i];
    for (int a = 0; a < 2; ++a) {
      first[a] = first[a] + table.w[i] * Fraction{table.c[i][a]};
      for (int b = 0; b < 2; ++b) {
        second[a][b] = second[a][b] + table.w[i] * Fraction{table.c[i][a] * table.c[i][b]};
      }
    }
  }
  if (!(wsum == Fraction{1})) {
    report.push_back({"weight-sum", "sum of weights is " + std::to_string(wsum.num()) + "/" +
                                      std::to_string(wsum.den())});
  }
  if (!(first[0] == Fraction{0}) || !(first[1] == Fraction{0})) {
    report.push_back({"first-moment", "sum_i w_i c_i is not zero"});
  }
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const Fraction expected = a == b ? table.cs2 : Fraction{0};
      if (!(second[a][b] == expected)) {
        report.push_back({"second-moment", "sum_i w_i c_i" + std::to_string(a) + " c_i" +
                                             std::to_string(b) + " != cs2 delta"});
      }
    }
  }

  for (std::size_t i = 0; i < q; ++i) {
    const int o = table.opposite[i];
    if (o < 0 || o >= table.q) {
      report.push_back({"opposite-pairing", "opposite[" + std::to_string(i) + "] out of range"});
      continue;
    }
    const auto& ci = table.c[i];
    const auto& co = table.c[static_cast<std::size_t>(o)];
    if (co[0] != -ci[0] || co[1] != -ci[1]) {
      report.push_back({"opposite-pairing", "c[opposite(" + std::to_string(i) + ")] != -c[" +
                                              std::to_string(i) + "]"});
    }
    if (!(table.w[static_cast<std::size_t>(o)] == table.w[i])) {
      report.push_back({"opposite-weight", "w[opposite(" + std::to_string(i) + ")] != w[" +
                                             std::to_string(i) + "]"});
    }
  }

  for (std::size_t i = 0; i < q; ++i) {
    for (int a = 0; a < 2; ++a) {
      if (std::abs(table.c[i][a]) > 1) {
        report.push_back({"velocity-range", "c[" + std::to_string(i) + "] leaves the vicinity"});
      }
    }
  }
  if (table.vicinity != 1) {
    report.push_back({"vicinity", "vicinity must be 1"});
  }
  return report;
}

inline constexpr int kMaxQ = 9;

/// Floating-point copy of a descriptor, laid out for the inner loops.
struct VelocitySet {
  LatticeKind kind = LatticeKind::D2Q9;
  int q = 0;
  std::array<int, kMaxQ> cx{};
  std::array<int, kMaxQ> cy{};
  std::array<int, kMaxQ> opposite{};
  std::array<double, kMaxQ> w{};
  double cs2 = 0.0;
  double invCs2 = 0.0;

  explicit VelocitySet(const DescriptorTable& table) : kind(table.name), q(table.q) {
    if (q > kMaxQ) {
      throw ValidationError("descriptor has more than " + std::to_string(kMaxQ) + " velocities");
    }
    for (int i = 0; i < q; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      cx[ii] = table.c[ii][0];
      cy[ii] = table.c[ii][1];
      opposite[ii] = table.opposite[ii];
      w[ii] = table.w[ii].value();
    }
    cs2 = table.cs2.value();
    invCs2 = 1.0 / cs2;
  }

  explicit VelocitySet(LatticeKind k) : VelocitySet(descriptorData(k)) {}
};

} // namespace lbkit
