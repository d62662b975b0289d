#include <array>
#include <cmath>
#include <string>

#include "psiest/error.hpp"
#include "psiest/families.hpp"

namespace psiest {

namespace {

// B_{2k} / (2k) for k = 1..7.
constexpr std::array<double, 7> kBernoulliOverOrder = {
    1.0 / 12.0,    -1.0 / 120.0,          1.0 / 252.0,  -1.0 / 240.0,
    1.0 / 132.0,   -691.0 / 32760.0,      1.0 / 12.0,
};

// Asymptotic series is accurate to < 1e-13 from here on.
constexpr double kAsymptoticThreshold = 6.0;

}  // namespace

double digamma(double x) {
  if (!(x > 0.0) || std::isinf(x)) {
    throw Error(Errc::kDomainError,
                "digamma requires finite x > 0, got " + std::to_string(x));
  }
  double shift = 0.0;
  while (x < kAsymptoticThreshold) {
    shift += 1.0 / x;
    x += 1.0;
  }
  const double inv2 = 1.0 / (x * x);
  double series = 0.0;
  double power = inv2;
  for (double coeff : kBernoulliOverOrder) {
    series += coeff * power;
    power *= inv2;
  }
  return (std::log(x) - 0.5 / x - series) - shift;
}

}  // namespace psiest
