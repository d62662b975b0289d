#pragma once

#include <optional>
#include <string_view>

#include "psiest/kernel.hpp"

namespace psiest {

struct SolverConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_expand = 200;
  int max_bisect = 200;
  std::optional<double> seed_guess;

  void validate() const;
  /// Bracket width at which bisection stops near parameter value t.
  double width_tol(double t) const;
};

enum class SolveStatus {
  kConverged,
  kNoPositivePart,
  kNoNegativePart,
  kMaxIterations,
};

std::string_view status_name(SolveStatus status);

/// Outcome of a sign-change search. On kConverged the sum is strictly positive
/// at bracket_lo and non-positive at bracket_hi, and theta is the bracket
/// midpoint. residual is diagnostic only.
struct SignChangeResult {
  double theta = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
  double residual = 0.0;
  SolveStatus status = SolveStatus::kConverged;

  bool converged() const noexcept { return status == SolveStatus::kConverged; }
};

/// Point of decreasing-type sign change of h on theta, using only the sign of
/// h(t) > 0. h need not be continuous.
SignChangeResult find_sign_change(const RealFn& h, const OpenInterval& theta,
                                  double seed, const SolverConfig& cfg = {});

/// Generalized psi-estimator: point of sign change of t -> sum w_i psi(x_i, t).
SignChangeResult solve_sign_change(const PsiKernel& kernel,
                                   const WeightedSample& sample,
                                   const SolverConfig& cfg = {});

/// Single-observation estimator; closed form when the kernel has one.
/// Throws Error(kSolverFailure) if the search fails.
double theta1(const PsiKernel& kernel, double x, const SolverConfig& cfg = {});

/// Generalized left inverse of a strictly increasing f on theta, evaluated at
/// y in conv(f(theta)). Constant across jump gaps of f. Throws
/// Error(kOutOfRange) when y lies outside the range hull.
double generalized_left_inverse(const RealFn& f, const OpenInterval& theta,
                                double y, const SolverConfig& cfg = {});

}  // namespace psiest
