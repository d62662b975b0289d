#include "psiest/solver.hpp"

#include <algorithm>
#include <cmath>

#include "psiest/error.hpp"

namespace psiest {

void SolverConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw Error(Errc::kInvalidArgument, "solver tolerances must be > 0");
  }
  if (max_expand < 1 || max_bisect < 1) {
    throw Error(Errc::kInvalidArgument, "iteration limits must be >= 1");
  }
}

double SolverConfig::width_tol(double t) const {
  return std::max(abs_tol, rel_tol * std::abs(t));
}

std::string_view status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "Converged";
    case SolveStatus::kNoPositivePart: return "NoPositivePart";
    case SolveStatus::kNoNegativePart: return "NoNegativePart";
    case SolveStatus::kMaxIterations: return "MaxIterations";
  }
  return "Unknown";
}

namespace {

// One outward step from c toward the upper end of theta. Finite ends are
// approached by halving the remaining distance; infinite ends by a doubling
// step.
double step_up(const OpenInterval& theta, double c, double& step) {
  if (std::isfinite(theta.hi())) return c + 0.5 * (theta.hi() - c);
  const double next = c + step;
  step *= 2.0;
  return next;
}

double step_down(const OpenInterval& theta, double c, double& step) {
  if (std::isfinite(theta.lo())) return c - 0.5 * (c - theta.lo());
  const double next = c - step;
  step *= 2.0;
  return next;
}

bool positive(const RealFn& h, double t) {
  const double v = h(t);
  if (std::isnan(v)) {
    throw Error(Errc::kDomainError,
                "sign undefined (NaN) at t = " + std::to_string(t));
  }
  return v > 0.0;
}

}  // namespace

SignChangeResult find_sign_change(const RealFn& h, const OpenInterval& theta,
                                  double seed, const SolverConfig& cfg) {
  cfg.validate();
  if (!theta.contains(seed)) seed = theta.representative();

  SignChangeResult result;
  double lo = seed;
  double hi = seed;
  int iterations = 0;

  if (positive(h, seed)) {
    double step = std::max(1.0, std::abs(seed));
    double c = seed;
    bool found = false;
    for (int k = 0; k < cfg.max_expand; ++k) {
      ++iterations;
      const double next = step_up(theta, c, step);
      if (!theta.contains(next) || next == c) break;
      c = next;
      if (positive(h, c)) {
        lo = c;
      } else {
        hi = c;
        found = true;
        break;
      }
    }
    if (!found) {
      result.status = SolveStatus::kNoNegativePart;
      result.bracket_lo = result.bracket_hi = result.theta = lo;
      result.iterations = iterations;
      return result;
    }
  } else {
    double step = std::max(1.0, std::abs(seed));
    double c = seed;
    bool found = false;
    for (int k = 0; k < cfg.max_expand; ++k) {
      ++iterations;
      const double next = step_down(theta, c, step);
      if (!theta.contains(next) || next == c) break;
      c = next;
      if (positive(h, c)) {
        lo = c;
        found = true;
        break;
      }
      hi = c;
    }
    if (!found) {
      result.status = SolveStatus::kNoPositivePart;
      result.bracket_lo = result.bracket_hi = result.theta = hi;
      result.iterations = iterations;
      return result;
    }
  }

  // Invariant: h(lo) > 0 >= h(hi), lo < hi.
  int bisections = 0;
  SolveStatus status = SolveStatus::kConverged;
  while (hi - lo > cfg.width_tol(std::max(std::abs(lo), std::abs(hi)))) {
    if (bisections >= cfg.max_bisect) {
      status = SolveStatus::kMaxIterations;
      break;
    }
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;  // one ulp apart
    ++bisections;
    if (positive(h, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  result.status = status;
  result.bracket_lo = lo;
  result.bracket_hi = hi;
  result.theta = lo + 0.5 * (hi - lo);
  result.iterations = iterations + bisections;
  result.residual = h(result.theta);
  return result;
}

SignChangeResult solve_sign_change(const PsiKernel& kernel,
                                   const WeightedSample& sample,
                                   const SolverConfig& cfg) {
  for (double x : sample.xs()) {
    if (!kernel.admissible(x)) {
      throw Error(Errc::kDomainError, "observation " + std::to_string(x) +
                                          " not admissible for " + kernel.name);
    }
  }

  double seed = kernel.theta.representative();
  if (cfg.seed_guess && kernel.theta.contains(*cfg.seed_guess)) {
    seed = *cfg.seed_guess;
  } else if (kernel.theta1) {
    // Weighted mean of the single-observation estimates lies in their hull,
    // which contains the answer.
    double num = 0.0;
    const auto xs = sample.xs();
    const auto ws = sample.weights();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (ws[i] > 0.0) num += ws[i] * (*kernel.theta1)(xs[i]);
    }
    const double mean = num / sample.total_weight();
    if (kernel.theta.contains(mean)) seed = mean;
  }

  const RealFn h = [&](double t) { return weighted_sum(kernel, sample, t); };
  return find_sign_change(h, kernel.theta, seed, cfg);
}

double theta1(const PsiKernel& kernel, double x, const SolverConfig& cfg) {
  if (!kernel.admissible(x)) {
    throw Error(Errc::kDomainError, "observation " + std::to_string(x) +
                                        " not admissible for " + kernel.name);
  }
  if (kernel.theta1) return (*kernel.theta1)(x);
  const auto result = solve_sign_change(kernel, WeightedSample::uniform({x}), cfg);
  if (!result.converged()) {
    throw Error(Errc::kSolverFailure,
                std::string(status_name(result.status)) + " for " +
                    kernel.name + " at x = " + std::to_string(x));
  }
  return result.theta;
}

double generalized_left_inverse(const RealFn& f, const OpenInterval& theta,
                                double y, const SolverConfig& cfg) {
  if (std::isnan(y)) throw Error(Errc::kDomainError, "NaN argument");
  const double seed = cfg.seed_guess.value_or(theta.representative());
  // y - f(t) > 0 exactly when f(t) < y.
  const RealFn h = [&](double t) { return y - f(t); };
  const auto result = find_sign_change(h, theta, seed, cfg);
  if (!result.converged()) {
    throw Error(Errc::kOutOfRange,
                "value " + std::to_string(y) +
                    " outside the convex hull of the range (" +
                    std::string(status_name(result.status)) + ")");
  }
  return result.theta;
}

}  // namespace psiest
