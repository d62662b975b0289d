#include "psiest/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "psiest/error.hpp"

namespace psiest {

OpenInterval::OpenInterval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (std::isnan(lo) || std::isnan(hi) || !(lo < hi) || lo == kInf ||
      hi == -kInf) {
    throw Error(Errc::kInvalidArgument,
                "open interval requires lo < hi (got " + std::to_string(lo) +
                    ", " + std::to_string(hi) + ")");
  }
}

double OpenInterval::representative() const noexcept {
  const bool lo_finite = std::isfinite(lo_);
  const bool hi_finite = std::isfinite(hi_);
  if (lo_finite && hi_finite) return lo_ + 0.5 * (hi_ - lo_);
  if (lo_finite) return lo_ + std::max(1.0, std::abs(lo_));
  if (hi_finite) return hi_ - std::max(1.0, std::abs(hi_));
  return 0.0;
}

double OpenInterval::from_unit(double u) const {
  const bool lo_finite = std::isfinite(lo_);
  const bool hi_finite = std::isfinite(hi_);
  if (lo_finite && hi_finite) return lo_ + u * (hi_ - lo_);
  if (lo_finite) return lo_ + std::max(1.0, std::abs(lo_)) * u / (1.0 - u);
  if (hi_finite) return hi_ - std::max(1.0, std::abs(hi_)) * (1.0 - u) / u;
  return (u - 0.5) / (u * (1.0 - u));
}

std::vector<double> OpenInterval::interior_grid(std::size_t n) const {
  std::vector<double> grid;
  grid.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(n + 1);
    const double t = from_unit(u);
    if (contains(t) && (grid.empty() || t > grid.back())) grid.push_back(t);
  }
  return grid;
}

WeightedSample::WeightedSample(std::vector<double> xs,
                               std::vector<double> weights)
    : xs_(std::move(xs)), weights_(std::move(weights)) {
  if (xs_.empty()) {
    throw Error(Errc::kInvalidArgument, "sample must be nonempty");
  }
  if (xs_.size() != weights_.size()) {
    throw Error(Errc::kInvalidArgument,
                "observation and weight counts differ");
  }
  bool any_positive = false;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(Errc::kNegativeWeight, "weights must be finite and >= 0");
    }
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) {
    throw Error(Errc::kInvalidArgument, "at least one weight must be > 0");
  }
  for (double x : xs_) {
    if (std::isnan(x)) throw Error(Errc::kDomainError, "NaN observation");
  }
}

WeightedSample WeightedSample::uniform(std::vector<double> xs) {
  auto weights = std::vector<double>(xs.size(), 1.0);
  return WeightedSample(std::move(xs), std::move(weights));
}

bool WeightedSample::is_uniform() const noexcept {
  return std::all_of(weights_.begin(), weights_.end(),
                     [&](double w) { return w == weights_.front(); });
}

double WeightedSample::total_weight() const noexcept {
  double total = 0.0;
  for (double w : weights_) total += w;
  return total;
}

WeightedSample concat(const WeightedSample& a, const WeightedSample& b) {
  std::vector<double> xs(a.xs_);
  xs.insert(xs.end(), b.xs_.begin(), b.xs_.end());
  std::vector<double> ws(a.weights_);
  ws.insert(ws.end(), b.weights_.begin(), b.weights_.end());
  return WeightedSample(std::move(xs), std::move(ws));
}

double weighted_sum(const PsiKernel& kernel, const WeightedSample& sample,
                    double t, Summation mode) {
  if (!kernel.theta.contains(t)) {
    throw Error(Errc::kDomainError,
                "parameter " + std::to_string(t) + " outside theta");
  }
  const auto xs = sample.xs();
  const auto ws = sample.weights();
  double sum = 0.0;
  double carry = 0.0;  // Neumaier compensation term
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!kernel.admissible(xs[i])) {
      throw Error(Errc::kDomainError, "observation " + std::to_string(xs[i]) +
                                          " not admissible for " + kernel.name);
    }
    if (ws[i] == 0.0) continue;
    const double term = ws[i] * kernel.eval(xs[i], t);
    if (mode == Summation::kPlain) {
      sum += term;
    } else {
      const double next = sum + term;
      if (std::abs(sum) >= std::abs(term)) {
        carry += (sum - next) + term;
      } else {
        carry += (term - next) + sum;
      }
      sum = next;
    }
  }
  return sum + carry;
}

std::vector<double> uniform_weights(std::size_t n) {
  if (n == 0) throw Error(Errc::kInvalidArgument, "n must be >= 1");
  return std::vector<double>(n, 1.0);
}

std::optional<OpenInterval> empirical_theta1_hull(
    const PsiKernel& kernel, std::span<const double> witnesses) {
  if (!kernel.theta1) {
    throw Error(Errc::kMissingClosedForm,
                kernel.name + " has no closed-form single-observation estimator");
  }
  if (witnesses.empty()) {
    throw Error(Errc::kInvalidArgument, "witness set must be nonempty");
  }
  double lo = kInf;
  double hi = -kInf;
  for (double x : witnesses) {
    if (!kernel.admissible(x)) {
      throw Error(Errc::kDomainError,
                  "witness " + std::to_string(x) + " not admissible");
    }
    const double v = (*kernel.theta1)(x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo < hi)) return std::nullopt;
  return OpenInterval(lo, hi);
}

}  // namespace psiest
