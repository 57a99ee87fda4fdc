#pragma once

// Gradient-based minimization of black-box objectives: difference-quotient
// gradients, backtracking / bracketing line searches and the steepest descent,
// Barzilai-Borwein and LBFGS drivers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lbkit/error.hpp"
#include "lbkit/log.hpp"

namespace lbkit {

using Control = std::vector<double>;
using Objective = std::function<double(const Control&)>;
using GradientFunction = std::function<Control(const Control&)>;

enum class GradientMode { FDQ, CDQ, Provided };
enum class OptimizerMethod { SteepestDescent, LBFGS, BarzilaiBorwein };
enum class StepCondition { None, Smaller, Armijo, Wolfe, StrongWolfe };

inline OptimizerMethod optimizerMethodFromString(std::string_view s) {
  if (s == "SteepestDescent") {
    return OptimizerMethod::SteepestDescent;
  }
  if (s == "LBFGS") {
    return OptimizerMethod::LBFGS;
  }
  if (s == "BarzilaiBorwein") {
    return OptimizerMethod::BarzilaiBorwein;
  }
  throw ValidationError("unknown optimizer method '" + std::string(s) + "'");
}

inline StepCondition stepConditionFromString(std::string_view s) {
  if (s == "None") {
    return StepCondition::None;
  }
  if (s == "Smaller") {
    return StepCondition::Smaller;
  }
  if (s == "Armijo") {
    return StepCondition::Armijo;
  }
  if (s == "Wolfe") {
    return StepCondition::Wolfe;
  }
  if (s == "StrongWolfe") {
    return StepCondition::StrongWolfe;
  }
  throw ValidationError("unknown step condition '" + std::string(s) + "'");
}

inline GradientMode gradientModeFromString(std::string_view s) {
  if (s == "FDQ") {
    return GradientMode::FDQ;
  }
  if (s == "CDQ") {
    return GradientMode::CDQ;
  }
  if (s == "Provided") {
    return GradientMode::Provided;
  }
  throw ValidationError("unknown gradient mode '" + std::string(s) + "'");
}

inline double dotProduct(const Control& a, const Control& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    s += a[k] * b[k];
  }
  return s;
}

inline double euclideanNorm(const Control& a) { return std::sqrt(dotProduct(a, a)); }

// -- gradients --------------------------------------------------------------------

inline double fdStepFor(double alpha, double h) { return std::max(1.0, std::abs(alpha)) * h; }

/// Forward difference quotient with per-component step max(1,|alpha_k|) h.
inline Control gradientFDQ(const Objective& J, const Control& alpha, double h,
                           std::optional<double> valueAtAlpha = std::nullopt) {
  if (!(h > 0.0)) {
    throw ValidationError("finite-difference step must be positive");
  }
  const double j0 = valueAtAlpha ? *valueAtAlpha : J(alpha);
  Control g(alpha.size());
  Control probe = alpha;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    const double step = fdStepFor(alpha[k], h);
    probe[k] = alpha[k] + step;
    g[k] = (J(probe) - j0) / step;
    probe[k] = alpha[k];
  }
  return g;
}

/// Central difference quotient with per-component step max(1,|alpha_k|) h.
inline Control gradientCDQ(const Objective& J, const Control& alpha, double h) {
  if (!(h > 0.0)) {
    throw ValidationError("finite-difference step must be positive");
  }
  Control g(alpha.size());
  Control probe = alpha;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    const double step = fdStepFor(alpha[k], h);
    probe[k] = alpha[k] + step;
    const double plus = J(probe);
    probe[k] = alpha[k] - step;
    const double minus = J(probe);
    probe[k] = alpha[k];
    g[k] = (plus - minus) / (2.0 * step);
  }
  return g;
}

// -- problem and parameters ---------------------------------------------------------

struct OptimizationProblem {
  Objective objective;
  GradientFunction gradient;
  GradientMode gradientMode = GradientMode::CDQ;
  double fdStep = 1e-6;
  std::optional<Control> lower;
  std::optional<Control> upper;

  void validate(std::size_t dim) const {
    if (dim < 1) {
      throw ValidationError("control vector must have at least one component");
    }
    if (!objective) {
      throw ValidationError("optimization problem has no objective");
    }
    if (gradientMode == GradientMode::Provided && !gradient) {
      throw ValidationError("gradient mode Provided without a gradient function");
    }
    if (!(fdStep > 0.0)) {
      throw ValidationError("finite-difference step must be positive");
    }
    if ((lower && lower->size() != dim) || (upper && upper->size() != dim)) {
      throw ValidationError("bounds must match the control dimension");
    }
    if (lower && upper) {
      for (std::size_t k = 0; k < dim; ++k) {
        if ((*lower)[k] > (*upper)[k]) {
          throw ValidationError("lower bound exceeds upper bound");
        }
      }
    }
  }

  Control computeGradient(const Control& alpha, double valueAtAlpha) const {
    switch (gradientMode) {
    case GradientMode::FDQ: return gradientFDQ(objective, alpha, fdStep, valueAtAlpha);
    case GradientMode::CDQ: return gradientCDQ(objective, alpha, fdStep);
    case GradientMode::Provided: return gradient(alpha);
    }
    return {};
  }

  Control clamp(Control alpha) const {
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      if (lower) {
        alpha[k] = std::max(alpha[k], (*lower)[k]);
      }
      if (upper) {
        alpha[k] = std::min(alpha[k], (*upper)[k]);
      }
    }
    return alpha;
  }

  /// Zeroes gradient components that push an active bound outward.
  Control project(const Control& alpha, Control g) const {
    for (std::size_t k = 0; k < g.size(); ++k) {
      if ((lower && alpha[k] <= (*lower)[k] && g[k] > 0.0) ||
          (upper && alpha[k] >= (*upper)[k] && g[k] < 0.0)) {
        g[k] = 0.0;
      }
    }
    return g;
  }

  /// Zeroes direction components that leave the box at an active bound.
  Control projectDirection(const Control& alpha, Control d) const {
    for (double& v : d) {
      v = -v;
    }
    d = project(alpha, std::move(d));
    for (double& v : d) {
      v = -v;
    }
    return d;
  }
};

struct OptimizerParams {
  OptimizerMethod method = OptimizerMethod::LBFGS;
  int maxIt = 100;
  int maxStepAttempts = 20;
  double eps = 1e-10;
  double controlEps = 0.0;
  double lambda = 1.0;
  int memory = 20;
  std::optional<StepCondition> stepCondition;
  double armijoRho = 1e-4;
  double wolfeDelta = 0.9;
  bool failOnMaxIter = true;

  StepCondition effectiveStepCondition() const {
    if (stepCondition) {
      return *stepCondition;
    }
    switch (method) {
    case OptimizerMethod::SteepestDescent: return StepCondition::Armijo;
    case OptimizerMethod::LBFGS: return StepCondition::StrongWolfe;
    case OptimizerMethod::BarzilaiBorwein: return StepCondition::None;
    }
    return StepCondition::Armijo;
  }

  void validate() const {
    if (maxIt < 1 || maxStepAttempts < 1) {
      throw ValidationError("iteration limits must be positive");
    }
    if (!(armijoRho > 0.0 && armijoRho < 1.0)) {
      throw ValidationError("Armijo parameter must lie in (0,1)");
    }
    if (!(wolfeDelta > armijoRho && wolfeDelta < 1.0)) {
      throw ValidationError("Wolfe parameter must lie in (rho,1)");
    }
    if (!(lambda > 0.0)) {
      throw ValidationError("initial step must be positive");
    }
    // memory 0 is accepted and reduces LBFGS to steepest descent.
    if (memory < 0) {
      throw ValidationError("LBFGS memory must be nonnegative");
    }
    if (!(eps >= 0.0) || !(controlEps >= 0.0)) {
      throw ValidationError("tolerances must be nonnegative");
    }
  }
};

// -- line search ----------------------------------------------------------------------

/// Values a step condition is judged on: phi(s) = J(alpha + s d).
struct StepCheck {
  double step = 0.0;
  double phi0 = 0.0;
  double dphi0 = 0.0;
  double phi = 0.0;
  /// Directional derivative at the trial point; NaN when not evaluated.
  double dphi = std::numeric_limits<double>::quiet_NaN();
};

inline bool stepConditionHolds(StepCondition cond, const StepCheck& c, double rho, double delta) {
  const bool armijo = c.phi <= c.phi0 + rho * c.step * c.dphi0;
  switch (cond) {
  case StepCondition::None: return true;
  case StepCondition::Smaller: return c.phi < c.phi0;
  case StepCondition::Armijo: return armijo;
  case StepCondition::Wolfe: return armijo && c.dphi >= delta * c.dphi0;
  case StepCondition::StrongWolfe: return armijo && std::abs(c.dphi) <= -delta * c.dphi0;
  }
  return false;
}

struct LineSearchResult {
  StepCheck check;
  Control point;
  double value = 0.0;
  std::optional<Control> gradient;
  int attempts = 0;
};

/// Backtracking by halving (None/Smaller/Armijo) or bracket + bisection zoom
/// (Wolfe/StrongWolfe), starting from s = lambda.
inline LineSearchResult lineSearch(const OptimizationProblem& problem, const Control& alpha,
                                   double J0, const Control& g0, const Control& d,
                                   const OptimizerParams& params) {
  const StepCondition cond = params.effectiveStepCondition();
  const double dphi0 = dotProduct(g0, d);
  if (cond != StepCondition::None && !(dphi0 < 0.0)) {
    throw OptimizerError("line search direction is not a descent direction");
  }
  const bool needsGradient = cond == StepCondition::Wolfe || cond == StepCondition::StrongWolfe;

  auto trialPoint = [&](double s) {
    Control p = alpha;
    for (std::size_t k = 0; k < p.size(); ++k) {
      p[k] += s * d[k];
    }
    return problem.clamp(std::move(p));
  };

  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double s = params.lambda;
  double bestStep = 0.0;
  double bestValue = J0;
  for (int attempt = 1; attempt <= params.maxStepAttempts; ++attempt) {
    LineSearchResult r;
    r.attempts = attempt;
    r.point = trialPoint(s);
    r.value = problem.objective(r.point);
    r.check = StepCheck{s, J0, dphi0, r.value};
    if (std::isfinite(r.value) && r.value < bestValue) {
      bestValue = r.value;
      bestStep = s;
    }
    if (cond == StepCondition::None) {
      return r;
    }
    const bool finite = std::isfinite(r.value);
    if (!needsGradient) {
      if (finite && stepConditionHolds(cond, r.check, params.armijoRho, params.wolfeDelta)) {
        return r;
      }
      s *= 0.5;
      continue;
    }
    if (!finite || !stepConditionHolds(StepCondition::Armijo, r.check, params.armijoRho,
                                       params.wolfeDelta)) {
      hi = s;
      s = 0.5 * (lo + hi);
      continue;
    }
    r.gradient = problem.computeGradient(r.point, r.value);
    r.check.dphi = dotProduct(*r.gradient, d);
    if (stepConditionHolds(cond, r.check, params.armijoRho, params.wolfeDelta)) {
      return r;
    }
    if (r.check.dphi < 0.0) {
      // Still descending: the step is too short.
      lo = s;
      s = std::isinf(hi) ? 2.0 * s : 0.5 * (lo + hi);
    } else {
      hi = s;
      s = 0.5 * (lo + hi);
    }
  }
  throw StepFailure("line search failed after " + std::to_string(params.maxStepAttempts) +
                      " step attempts",
                    bestStep, bestValue);
}

// -- directions -------------------------------------------------------------------------

struct CurvaturePair {
  Control s;
  Control y;
};

inline bool curvatureAcceptable(const Control& s, const Control& y) {
  return dotProduct(s, y) > 1e-14 * euclideanNorm(s) * euclideanNorm(y);
}

/// Two-loop recursion; empty memory gives -gradient. Pairs failing the
/// curvature guard are skipped.
inline Control lbfgsDirection(const std::deque<CurvaturePair>& memory, const Control& gradient) {
  Control q = gradient;
  std::vector<double> a(memory.size(), 0.0);
  std::vector<bool> used(memory.size(), false);
  double gamma = 1.0;
  bool haveGamma = false;
  for (std::size_t k = memory.size(); k-- > 0;) {
    const auto& [s, y] = memory[k];
    if (!curvatureAcceptable(s, y)) {
      continue;
    }
    used[k] = true;
    const double rho = 1.0 / dotProduct(y, s);
    a[k] = rho * dotProduct(s, q);
    for (std::size_t i = 0; i < q.size(); ++i) {
      q[i] -= a[k] * y[i];
    }
    if (!haveGamma) {
      gamma = dotProduct(s, y) / dotProduct(y, y);
      haveGamma = true;
    }
  }
  Control r = q;
  for (double& v : r) {
    v *= gamma;
  }
  for (std::size_t k = 0; k < memory.size(); ++k) {
    if (!used[k]) {
      continue;
    }
    const auto& [s, y] = memory[k];
    const double rho = 1.0 / dotProduct(y, s);
    const double b = rho * dotProduct(y, r);
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] += s[i] * (a[k] - b);
    }
  }
  for (double& v : r) {
    v = -v;
  }
  return r;
}

// -- driver -------------------------------------------------------------------------------

struct TraceEntry {
  int iteration = 0;
  double value = 0.0;
  double gradNorm = 0.0;
  /// Accepted step length (0 for the final entry).
  double step = 0.0;
  /// The accepted step's line-search data, for re-checking the condition.
  StepCheck check;
};

struct OptimizerResult {
  Control control;
  double value = 0.0;
  Control gradient;
  int iterations = 0;
  bool converged = false;
  std::string stopReason;
  std::vector<TraceEntry> trace;
  StepCondition stepCondition = StepCondition::Armijo;
};

inline OptimizerResult optimize(const OptimizationProblem& problem, const OptimizerParams& params,
                                const Control& alpha0) {
  problem.validate(alpha0.size());
  params.validate();
  for (double a : alpha0) {
    if (!std::isfinite(a)) {
      throw ValidationError("initial control must be finite");
    }
  }
  const Logger log("Optimizer");
  OptimizerResult result;
  result.stepCondition = params.effectiveStepCondition();
  Control alpha = problem.clamp(alpha0);
  double J = problem.objective(alpha);
  Control g = problem.computeGradient(alpha, J);
  std::deque<CurvaturePair> memory;
  std::optional<CurvaturePair> lastPair;

  for (int it = 0;; ++it) {
    const Control pg = problem.project(alpha, g);
    const double gnorm = euclideanNorm(pg);
    TraceEntry entry{it, J, gnorm, 0.0, {}};
    if (gnorm < params.eps) {
      result.trace.push_back(entry);
      result.converged = true;
      result.stopReason = "gradient norm below tolerance";
      result.iterations = it;
      break;
    }
    if (it >= params.maxIt) {
      result.trace.push_back(entry);
      result.iterations = it;
      result.stopReason = "iteration limit reached";
      if (params.failOnMaxIter) {
        throw MaxIterFailure(
          "Optimization problem failed to converge within specified iteration limit", alpha, J);
      }
      break;
    }

    Control d;
    switch (params.method) {
    case OptimizerMethod::SteepestDescent:
      d = pg;
      for (double& v : d) {
        v = -v;
      }
      break;
    case OptimizerMethod::LBFGS:
      d = problem.projectDirection(alpha, lbfgsDirection(memory, pg));
      if (!(dotProduct(d, g) < 0.0)) {
        memory.clear();
        d = lbfgsDirection(memory, pg);
      }
      break;
    case OptimizerMethod::BarzilaiBorwein: {
      double scale = 1.0;
      if (lastPair && curvatureAcceptable(lastPair->s, lastPair->y)) {
        scale = dotProduct(lastPair->s, lastPair->y) / dotProduct(lastPair->y, lastPair->y);
      }
      d = pg;
      for (double& v : d) {
        v = -scale * v;
      }
      break;
    }
    }

    const LineSearchResult ls = lineSearch(problem, alpha, J, g, d, params);
    entry.step = ls.check.step;
    entry.check = ls.check;
    result.trace.push_back(entry);

    Control gNew = ls.gradient ? *ls.gradient : problem.computeGradient(ls.point, ls.value);
    CurvaturePair pair{Control(alpha.size()), Control(alpha.size())};
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      pair.s[k] = ls.point[k] - alpha[k];
      pair.y[k] = gNew[k] - g[k];
    }
    const double change = euclideanNorm(pair.s);
    if (params.method == OptimizerMethod::LBFGS && params.memory > 0 &&
        curvatureAcceptable(pair.s, pair.y)) {
      memory.push_back(pair);
      while (memory.size() > static_cast<std::size_t>(params.memory)) {
        memory.pop_front();
      }
    }
    lastPair = std::move(pair);
    alpha = ls.point;
    J = ls.value;
    g = std::move(gNew);

    if (change < params.controlEps) {
      result.trace.push_back(TraceEntry{it + 1, J, euclideanNorm(g), 0.0, {}});
      result.converged = true;
      result.stopReason = "control change below tolerance";
      result.iterations = it + 1;
      break;
    }
  }
  result.control = alpha;
  result.value = J;
  result.gradient = g;
  log.info("stopped after ", result.iterations, " iterations (", result.stopReason, "), J = ", J);
  return result;
}

} // namespace lbkit
