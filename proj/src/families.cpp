#include "psiest/families.hpp"

#include <array>
#include <cmath>

#include "psiest/error.hpp"
#include "psiest/format.hpp"

namespace psiest {

namespace {

struct FamilyInfo {
  Family family;
  std::string_view id;
  std::string_view param;
};

constexpr std::array<FamilyInfo, 11> kFamilies = {{
    {Family::kExpectile, "expectile", "alpha"},
    {Family::kMathieu, "mathieu", ""},
    {Family::kNormalVar, "normal_var", "m"},
    {Family::kBetaAlpha, "beta_alpha", "beta"},
    {Family::kBetaBeta, "beta_beta", "alpha"},
    {Family::kGammaShape, "gamma_shape", "lambda"},
    {Family::kGammaRate, "gamma_rate", "p"},
    {Family::kLomaxRateLambda, "lomax_rate_lambda", "alpha"},
    {Family::kLomaxShapeAlpha, "lomax_shape_alpha", "lambda"},
    {Family::kLognormalMu, "lognormal_mu", "sigma2"},
    {Family::kLaplaceScale, "laplace_scale", "mu"},
}};

const FamilyInfo& info(Family family) {
  for (const auto& entry : kFamilies) {
    if (entry.family == family) return entry;
  }
  throw Error(Errc::kInvalidArgument, "unknown family");
}

FamilySpec single_param(Family family, double value) {
  FamilySpec spec;
  spec.family = family;
  spec.params.emplace(std::string(info(family).param), value);
  return spec;
}

std::string kernel_name(const FamilySpec& spec) {
  std::string name(family_id(spec.family));
  if (spec.family == Family::kMathieu) {
    return name + "(f=" + spec.mathieu_label + ")";
  }
  const auto param = family_param_name(spec.family);
  return name + "(" + std::string(param) + "=" +
         shortest_repr(spec.param(param)) + ")";
}

bool in_unit_interval(double x) { return x > 0.0 && x < 1.0; }
bool positive(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

std::string_view family_id(Family family) { return info(family).id; }

std::optional<Family> parse_family(std::string_view id) {
  for (const auto& entry : kFamilies) {
    if (entry.id == id) return entry.family;
  }
  return std::nullopt;
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> families = [] {
    std::vector<Family> out;
    for (const auto& entry : kFamilies) out.push_back(entry.family);
    return out;
  }();
  return families;
}

std::string_view family_param_name(Family family) { return info(family).param; }

double FamilySpec::param(std::string_view name) const {
  const auto it = params.find(name);
  if (it == params.end()) {
    throw Error(Errc::kInvalidParameter,
                std::string(family_id(family)) + " requires parameter '" +
                    std::string(name) + "'");
  }
  return it->second;
}

void FamilySpec::validate() const {
  const auto fail = [&](const std::string& why) {
    throw Error(Errc::kInvalidParameter,
                std::string(family_id(family)) + ": " + why);
  };
  const auto name = family_param_name(family);
  for (const auto& [key, value] : params) {
    if (key != name) fail("unknown parameter '" + key + "'");
  }
  if (family == Family::kMathieu) {
    if (!mathieu_f) fail("missing function f");
    if (std::abs(mathieu_f(0.0)) > 1e-12) fail("f(0) must be 0");
    const auto grid = OpenInterval::positive_half_line().interior_grid(513);
    double prev = mathieu_f(0.0);
    for (double u : grid) {
      const double v = mathieu_f(u);
      if (!(v > prev)) fail("f must be strictly increasing on [0, inf)");
      prev = v;
    }
    return;
  }
  const double v = param(name);
  if (!std::isfinite(v)) fail(std::string(name) + " must be finite");
  switch (family) {
    case Family::kExpectile:
      if (!(v > 0.0 && v < 1.0)) fail("alpha must lie in (0, 1)");
      break;
    case Family::kNormalVar:
    case Family::kLaplaceScale:
      break;
    default:
      if (!(v > 0.0)) fail(std::string(name) + " must be > 0");
      break;
  }
}

namespace families {
FamilySpec expectile(double alpha) {
  return single_param(Family::kExpectile, alpha);
}
FamilySpec mathieu(RealFn f, std::string label) {
  FamilySpec spec;
  spec.family = Family::kMathieu;
  spec.mathieu_f = std::move(f);
  spec.mathieu_label = std::move(label);
  return spec;
}
FamilySpec normal_var(double m) { return single_param(Family::kNormalVar, m); }
FamilySpec beta_alpha(double beta) {
  return single_param(Family::kBetaAlpha, beta);
}
FamilySpec beta_beta(double alpha) {
  return single_param(Family::kBetaBeta, alpha);
}
FamilySpec gamma_shape(double lambda) {
  return single_param(Family::kGammaShape, lambda);
}
FamilySpec gamma_rate(double p) { return single_param(Family::kGammaRate, p); }
FamilySpec lomax_rate_lambda(double alpha) {
  return single_param(Family::kLomaxRateLambda, alpha);
}
FamilySpec lomax_shape_alpha(double lambda) {
  return single_param(Family::kLomaxShapeAlpha, lambda);
}
FamilySpec lognormal_mu(double sigma2) {
  return single_param(Family::kLognormalMu, sigma2);
}
FamilySpec laplace_scale(double mu) {
  return single_param(Family::kLaplaceScale, mu);
}
}  // namespace families

PsiKernel make_kernel(const FamilySpec& spec) {
  spec.validate();
  const auto real_line = OpenInterval::real_line();
  const auto half_line = OpenInterval::positive_half_line();
  PsiKernel k{kernel_name(spec), half_line, {}, std::nullopt, std::nullopt, {}};

  switch (spec.family) {
    case Family::kExpectile: {
      const double a = spec.param("alpha");
      k.theta = real_line;
      k.eval = [a](double x, double t) {
        if (x > t) return a * (x - t);
        if (x < t) return (1.0 - a) * (x - t);
        return 0.0;
      };
      k.theta1 = [](double x) { return x; };
      k.domain_check = [](double x) { return std::isfinite(x); };
      break;
    }
    case Family::kMathieu: {
      auto f = spec.mathieu_f;
      k.theta = real_line;
      k.eval = [f](double x, double t) {
        if (x > t) return f(x - t);
        if (x < t) return -f(t - x);
        return 0.0;
      };
      k.theta1 = [](double x) { return x; };
      k.domain_check = [](double x) { return std::isfinite(x); };
      break;
    }
    case Family::kNormalVar: {
      const double m = spec.param("m");
      k.eval = [m](double x, double t) {
        return ((x - m) * (x - m) - t) / (2.0 * t * t);
      };
      k.theta1 = [m](double x) { return (x - m) * (x - m); };
      k.d2 = [m](double x, double t) {
        return -(x - m) * (x - m) / (t * t * t) + 0.5 / (t * t);
      };
      k.domain_check = [m](double x) { return std::isfinite(x) && x != m; };
      break;
    }
    case Family::kBetaAlpha: {
      const double b = spec.param("beta");
      k.eval = [b](double x, double t) {
        return 1.0 / t + std::log1p(-std::pow(x, b));
      };
      k.theta1 = [b](double x) { return -1.0 / std::log1p(-std::pow(x, b)); };
      k.d2 = [](double, double t) { return -1.0 / (t * t); };
      k.domain_check = in_unit_interval;
      break;
    }
    case Family::kBetaBeta: {
      const double a = spec.param("alpha");
      // (1/t) * (1 + (1 - a u)/(1 - u) * ln u) with u = x^t, evaluated through
      // ln u = t ln x so that 1 - u keeps precision as u -> 1.
      k.eval = [a](double x, double t) {
        const double log_u = t * std::log(x);
        const double u = std::exp(log_u);
        const double one_minus_u = -std::expm1(log_u);
        return (1.0 + (1.0 - a * u) / one_minus_u * log_u) / t;
      };
      k.domain_check = in_unit_interval;
      break;
    }
    case Family::kGammaShape: {
      const double log_lambda = std::log(spec.param("lambda"));
      k.eval = [log_lambda](double x, double t) {
        return -digamma(t) + std::log(x) + log_lambda;
      };
      k.domain_check = positive;
      break;
    }
    case Family::kGammaRate: {
      const double p = spec.param("p");
      k.eval = [p](double x, double t) { return p / t - x; };
      k.theta1 = [p](double x) { return p / x; };
      k.d2 = [p](double, double t) { return -p / (t * t); };
      k.domain_check = positive;
      break;
    }
    case Family::kLomaxRateLambda: {
      const double a = spec.param("alpha");
      k.eval = [a](double x, double t) {
        return (a * x - t) / (t * (t + x));
      };
      k.theta1 = [a](double x) { return a * x; };
      k.d2 = [a](double x, double t) {
        const double den = t * (t + x);
        return (-den - (a * x - t) * (2.0 * t + x)) / (den * den);
      };
      k.domain_check = positive;
      break;
    }
    case Family::kLomaxShapeAlpha: {
      const double lambda = spec.param("lambda");
      k.eval = [lambda](double x, double t) {
        return 1.0 / t - std::log1p(x / lambda);
      };
      k.theta1 = [lambda](double x) { return 1.0 / std::log1p(x / lambda); };
      k.d2 = [](double, double t) { return -1.0 / (t * t); };
      k.domain_check = positive;
      break;
    }
    case Family::kLognormalMu: {
      const double s2 = spec.param("sigma2");
      k.theta = real_line;
      k.eval = [s2](double x, double t) { return (std::log(x) - t) / s2; };
      k.theta1 = [](double x) { return std::log(x); };
      k.d2 = [s2](double, double) { return -1.0 / s2; };
      k.domain_check = positive;
      break;
    }
    case Family::kLaplaceScale: {
      const double mu = spec.param("mu");
      k.eval = [mu](double x, double t) {
        return std::abs(x - mu) / (t * t) - 1.0 / t;
      };
      k.theta1 = [mu](double x) { return std::abs(x - mu); };
      k.d2 = [mu](double x, double t) {
        return -2.0 * std::abs(x - mu) / (t * t * t) + 1.0 / (t * t);
      };
      k.domain_check = [mu](double x) { return std::isfinite(x) && x != mu; };
      break;
    }
  }
  return k;
}

std::optional<ClosedFormEstimate> closed_form_estimate(
    const FamilySpec& spec, const WeightedSample& sample) {
  spec.validate();
  const PsiKernel kernel = make_kernel(spec);
  for (double x : sample.xs()) {
    if (!kernel.admissible(x)) {
      throw Error(Errc::kDomainError, "observation " + shortest_repr(x) +
                                          " not admissible for " + kernel.name);
    }
  }

  // Weighted mean of g(x_i).
  const auto mean_of = [&](auto g) {
    double num = 0.0;
    const auto xs = sample.xs();
    const auto ws = sample.weights();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (ws[i] > 0.0) num += ws[i] * g(xs[i]);
    }
    return num / sample.total_weight();
  };

  double value = 0.0;
  switch (spec.family) {
    case Family::kNormalVar: {
      const double m = spec.param("m");
      value = mean_of([m](double x) { return (x - m) * (x - m); });
      break;
    }
    case Family::kBetaAlpha: {
      const double b = spec.param("beta");
      value = -1.0 / mean_of([b](double x) {
                return std::log1p(-std::pow(x, b));
              });
      break;
    }
    case Family::kGammaRate:
      value = spec.param("p") / mean_of([](double x) { return x; });
      break;
    case Family::kLomaxShapeAlpha: {
      const double lambda = spec.param("lambda");
      value = 1.0 / mean_of([lambda](double x) {
                return std::log1p(x / lambda);
              });
      break;
    }
    case Family::kLognormalMu:
      value = mean_of([](double x) { return std::log(x); });
      break;
    case Family::kLaplaceScale: {
      const double mu = spec.param("mu");
      value = mean_of([mu](double x) { return std::abs(x - mu); });
      break;
    }
    default:
      return std::nullopt;
  }
  return ClosedFormEstimate{value, !sample.is_uniform()};
}

BetaBounds beta_alpha_bounds(double alpha, const WeightedSample& sample) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(Errc::kInvalidParameter, "alpha must be > 0");
  }
  double num = 0.0;
  const auto xs = sample.xs();
  const auto ws = sample.weights();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!in_unit_interval(xs[i])) {
      throw Error(Errc::kDomainError,
                  "observation " + shortest_repr(xs[i]) + " outside (0, 1)");
    }
    if (ws[i] > 0.0) num += ws[i] * std::log(xs[i]);
  }
  const double log_geo_mean = num / sample.total_weight();
  return {-std::min(alpha, 1.0) / log_geo_mean,
          -std::max(alpha, 1.0) / log_geo_mean};
}

}  // namespace psiest
