#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psiest/kernel.hpp"

namespace psiest {

/// Statistical kernels from the catalog. Each family fixes one known
/// parameter and estimates another.
enum class Family {
  kExpectile,        // alpha; estimates a location
  kMathieu,          // increasing f with f(0) = 0; estimates a location
  kNormalVar,        // m; estimates sigma^2
  kBetaAlpha,        // beta; estimates alpha
  kBetaBeta,         // alpha; estimates beta
  kGammaShape,       // lambda; estimates p
  kGammaRate,        // p; estimates lambda
  kLomaxRateLambda,  // alpha; estimates lambda
  kLomaxShapeAlpha,  // lambda; estimates alpha
  kLognormalMu,      // sigma2; estimates mu
  kLaplaceScale,     // mu; estimates b
};

std::string_view family_id(Family family);
std::optional<Family> parse_family(std::string_view id);
const std::vector<Family>& all_families();

/// Name of the single known numeric parameter, or empty for mathieu.
std::string_view family_param_name(Family family);

struct FamilySpec {
  Family family = Family::kExpectile;
  std::map<std::string, double, std::less<>> params;
  // Mathieu only: the increasing function f on [0, inf) and its source text.
  RealFn mathieu_f;
  std::string mathieu_label;

  double param(std::string_view name) const;
  /// Throws Error(kInvalidParameter) when a parameter is missing or out of
  /// range, or a Mathieu f fails the f(0) = 0 / increasing checks.
  void validate() const;
};

namespace families {
FamilySpec expectile(double alpha);
FamilySpec mathieu(RealFn f, std::string label);
FamilySpec normal_var(double m);
FamilySpec beta_alpha(double beta);
FamilySpec beta_beta(double alpha);
FamilySpec gamma_shape(double lambda);
FamilySpec gamma_rate(double p);
FamilySpec lomax_rate_lambda(double alpha);
FamilySpec lomax_shape_alpha(double lambda);
FamilySpec lognormal_mu(double sigma2);
FamilySpec laplace_scale(double mu);
}  // namespace families

PsiKernel make_kernel(const FamilySpec& spec);

struct ClosedFormEstimate {
  double value = 0.0;
  // True when non-uniform weights were used; the textbook forms are stated
  // for equal weights and are extended here by weighted averaging.
  bool weighted_extension = false;
};

/// nullopt for families without an explicit estimator (expectile, mathieu,
/// beta_beta, gamma_shape, lomax_rate_lambda).
std::optional<ClosedFormEstimate> closed_form_estimate(
    const FamilySpec& spec, const WeightedSample& sample);

/// Gamma'(x)/Gamma(x) for x > 0.
double digamma(double x);

struct BetaBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds -min(alpha,1)/ln(g) <= r <= -max(alpha,1)/ln(g) on the beta_beta
/// estimate r, g the (weighted) geometric mean of observations in (0,1).
BetaBounds beta_alpha_bounds(double alpha, const WeightedSample& sample);

}  // namespace psiest
