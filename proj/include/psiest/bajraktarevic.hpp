#pragma once

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "psiest/kernel.hpp"
#include "psiest/solver.hpp"

namespace psiest {

/// psi(x, t) = p(x) * (F(x) - f(t)) with f strictly increasing on theta.
struct BajraktarevicSpec {
  RealFn f;
  RealFn p;
  RealFn F;
  OpenInterval theta = OpenInterval::real_line();
  std::optional<RealFn> f_prime;
  std::function<bool(double)> domain_check;

  /// Sampled checks: f increasing on a 513-point grid plus 100 random pairs;
  /// p > 0 and F inside the closed range hull of f on the witnesses.
  /// Throws Error(kInvalidArgument).
  void validate(std::span<const double> witnesses) const;
};

PsiKernel as_kernel(const BajraktarevicSpec& spec, const SolverConfig& cfg = {});

/// f^(-1)( sum w p F / sum w p ).
double estimate(const BajraktarevicSpec& spec, const WeightedSample& sample,
                const SolverConfig& cfg = {});

struct MobiusCoefficients {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;

  double det() const noexcept { return a * d - b * c; }
  double apply(double v) const noexcept { return (a * v + b) / (c * v + d); }
  /// Throws Error(kInvalidArgument) unless ad > bc.
  void validate() const;
};

/// (g, q, G) = ((af+b)/(cf+d), (cF+d)p, (aF+b)/(cF+d)). Throws
/// Error(kSignViolation) if cf+d is not positive on a grid of theta or cF+d is
/// not positive on the witnesses.
BajraktarevicSpec apply_mobius(const BajraktarevicSpec& spec,
                               const MobiusCoefficients& m,
                               std::span<const double> witnesses);

/// Schwarzian h'''/h' - 1.5 (h''/h')^2 from five-point central differences at
/// step and step/2, combined by Richardson extrapolation.
/// step <= 0 selects max(1e-2, 1e-2 |s|). Throws kDegenerateDerivative when
/// |h'(s)| <= 1e-8.
double schwarzian(const RealFn& h, double s, double step = 0.0);

/// Schwarzian of g o f^(-1) at f(t), computed as (S_g(t) - S_f(t)) / f'(t)^2.
double relative_schwarzian(const RealFn& f, const RealFn& g, double t,
                           double step = 0.0);

struct MobiusFit {
  MobiusCoefficients coeffs;  // unit norm, ad > bc
  double max_residual = 0.0;
  double scale = 0.0;
};

/// Fits (cf+d)g = af+b from three anchors (first, middle, last) and checks the
/// residual at every probe against 1e-8 * scale. nullopt means no fit. Throws
/// kDegenerateProbes for fewer than four probes, repeated f-values or a
/// rank-deficient anchor system.
std::optional<MobiusFit> mobius_fit(std::span<const double> f_vals,
                                    std::span<const double> g_vals);

/// det of the 4x4 matrix with rows 1, f, g, f*g over four probes.
double determinant_test(const std::array<double, 4>& f_vals,
                        const std::array<double, 4>& g_vals);

/// Product of the Euclidean norms of the four rows above.
double determinant_scale(const std::array<double, 4>& f_vals,
                         const std::array<double, 4>& g_vals);

/// True when every witness has the same theta1 = f^(-1)(F(x)) within tol.
bool theta_psi_empty(const BajraktarevicSpec& spec,
                     std::span<const double> witnesses,
                     const SolverConfig& cfg = {});

}  // namespace psiest
