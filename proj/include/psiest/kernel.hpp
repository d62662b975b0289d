#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace psiest {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Nondegenerate open interval (lo, hi) of the extended real line.
class OpenInterval {
 public:
  OpenInterval(double lo, double hi);

  static OpenInterval real_line() { return {-kInf, kInf}; }
  static OpenInterval positive_half_line() { return {0.0, kInf}; }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  bool contains(double t) const noexcept { return lo_ < t && t < hi_; }

  /// Finite representative point: the midpoint when both ends are finite,
  /// otherwise a point at unit-or-scale distance from the finite end.
  double representative() const noexcept;

  /// n points strictly inside the interval, increasing. Equispaced when the
  /// interval is bounded; equispaced in a logit/exp coordinate otherwise.
  std::vector<double> interior_grid(std::size_t n) const;

  /// Maps u in (0,1) monotonically into the interval (same map as
  /// interior_grid).
  double from_unit(double u) const;

  friend bool operator==(const OpenInterval&, const OpenInterval&) = default;

 private:
  double lo_;
  double hi_;
};

using RealFn = std::function<double(double)>;
using BivariateFn = std::function<double(double, double)>;

/// A psi-kernel psi(x, t) on observations x and parameters t in theta.
///
/// theta1 is the closed-form single-observation estimator when one is known;
/// d2 is the closed-form partial derivative in t. Both are optional.
struct PsiKernel {
  std::string name;
  OpenInterval theta;
  BivariateFn eval;
  std::optional<RealFn> theta1;
  std::optional<BivariateFn> d2;
  std::function<bool(double)> domain_check;

  bool admissible(double x) const { return domain_check ? domain_check(x) : true; }
};

/// Observations with nonnegative weights, at least one strictly positive.
class WeightedSample {
 public:
  WeightedSample(std::vector<double> xs, std::vector<double> weights);

  static WeightedSample uniform(std::vector<double> xs);

  std::span<const double> xs() const noexcept { return xs_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return xs_.size(); }
  bool is_uniform() const noexcept;
  double total_weight() const noexcept;

  /// s1 followed by s2.
  friend WeightedSample concat(const WeightedSample& a, const WeightedSample& b);

 private:
  std::vector<double> xs_;
  std::vector<double> weights_;
};

enum class Summation { kPlain, kCompensated };

/// sum_i w_i * psi(x_i, t), accumulated left to right.
double weighted_sum(const PsiKernel& kernel, const WeightedSample& sample,
                    double t, Summation mode = Summation::kPlain);

std::vector<double> uniform_weights(std::size_t n);

/// (min theta1, max theta1) over the witnesses, or nullopt when every value
/// coincides. Requires the closed form.
std::optional<OpenInterval> empirical_theta1_hull(
    const PsiKernel& kernel, std::span<const double> witnesses);

}  // namespace psiest
