// Generators and independent oracles shared by the test binaries.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "psiest/bajraktarevic.hpp"
#include "psiest/families.hpp"
#include "psiest/kernel.hpp"

namespace testsupport {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(gen_);
  }
  bool coin() { return integer(0, 1) == 1; }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

struct Draw {
  psiest::FamilySpec spec;
  std::vector<double> xs;
};

// Random parameter and admissible observation for a family. Ranges stay away
// from the edges of X so the tests probe the estimators, not overflow.
inline double draw_observation(Rng& rng, const psiest::FamilySpec& spec) {
  using psiest::Family;
  switch (spec.family) {
    case Family::kExpectile:
    case Family::kMathieu:
      return rng.uniform(-10.0, 10.0);
    case Family::kNormalVar: {
      const double m = spec.param("m");
      const double d = rng.uniform(0.1, 3.0);
      return rng.coin() ? m + d : m - d;
    }
    case Family::kLaplaceScale: {
      const double mu = spec.param("mu");
      const double d = rng.uniform(0.1, 5.0);
      return rng.coin() ? mu + d : mu - d;
    }
    case Family::kBetaAlpha:
    case Family::kBetaBeta:
      return rng.uniform(0.02, 0.98);
    default:
      return rng.uniform(0.1, 10.0);
  }
}

inline psiest::FamilySpec draw_spec(Rng& rng, psiest::Family family) {
  namespace f = psiest::families;
  using psiest::Family;
  switch (family) {
    case Family::kExpectile: return f::expectile(rng.uniform(0.05, 0.95));
    case Family::kMathieu: {
      switch (rng.integer(0, 3)) {
        case 0: return f::mathieu([](double t) { return t; }, "t");
        case 1: return f::mathieu([](double t) { return t * t; }, "t^2");
        case 2: return f::mathieu([](double t) { return t + t * t * t; }, "t + t^3");
        default: return f::mathieu([](double t) { return std::sqrt(t); }, "sqrt(t)");
      }
    }
    case Family::kNormalVar: return f::normal_var(rng.uniform(-2.0, 2.0));
    case Family::kBetaAlpha: return f::beta_alpha(rng.uniform(0.2, 3.0));
    case Family::kBetaBeta: return f::beta_beta(rng.uniform(0.2, 3.0));
    case Family::kGammaShape: return f::gamma_shape(rng.uniform(0.2, 5.0));
    case Family::kGammaRate: return f::gamma_rate(rng.uniform(0.2, 5.0));
    case Family::kLomaxRateLambda: return f::lomax_rate_lambda(rng.uniform(0.2, 5.0));
    case Family::kLomaxShapeAlpha: return f::lomax_shape_alpha(rng.uniform(0.2, 5.0));
    case Family::kLognormalMu: return f::lognormal_mu(rng.uniform(0.2, 5.0));
    case Family::kLaplaceScale: return f::laplace_scale(rng.uniform(-2.0, 2.0));
  }
  return f::expectile(0.5);
}

inline Draw draw(Rng& rng, psiest::Family family, int max_n) {
  Draw d{draw_spec(rng, family), {}};
  const int n = rng.integer(1, max_n);
  for (int i = 0; i < n; ++i) d.xs.push_back(draw_observation(rng, d.spec));
  return d;
}

inline std::vector<double> random_weights(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (auto& v : w) v = rng.uniform(0.1, 3.0);
  return w;
}

// Bajraktarevic specs
inline const psiest::RealFn id_fn = [](double v) { return v; };
inline const psiest::RealFn one_fn = [](double) { return 1.0; };
inline const psiest::RealFn ln_fn = [](double v) { return std::log(v); };

// f from a small catalog, paired with a theta on which f(theta) is bounded
// below (except ln) so positive-denominator Mobius maps exist.
struct GenSpec {
  psiest::BajraktarevicSpec spec;
  std::string label;
  bool range_bounded_below;
};

inline GenSpec gen_spec(Rng& rng) {
  psiest::RealFn f;
  psiest::OpenInterval theta = psiest::OpenInterval::positive_half_line();
  std::string label;
  bool bounded = true;
  switch (rng.integer(0, 4)) {
    case 0: f = id_fn; label = "id"; break;
    case 1: f = ln_fn; label = "ln"; bounded = false; break;
    case 2:
      f = [](double t) { return std::exp(t); };
      theta = psiest::OpenInterval::real_line();
      label = "exp";
      break;
    case 3: f = [](double t) { return t * t * t; }; label = "t^3"; break;
    default: f = [](double t) { return 2 * t + 1; }; label = "2t+1"; break;
  }
  psiest::RealFn p;
  switch (rng.integer(0, 2)) {
    case 0: p = one_fn; break;
    case 1: p = id_fn; break;
    default: p = [](double x) { return std::exp(std::min(x, 5.0)); }; break;
  }
  // increasing h : (0, inf) -> (0, inf)
  psiest::RealFn h;
  const double a = rng.uniform(0.5, 2.0);
  const double b = rng.uniform(0.0, 1.0);
  switch (rng.integer(0, 2)) {
    case 0: h = [a, b](double x) { return a * x + b; }; break;
    case 1: h = [a](double x) { return a * x * x; }; break;
    default: h = [a, b](double x) { return a * std::sqrt(x) + b; }; break;
  }
  // exp(h) large enough makes a Mobius image of f flat to double precision
  if (label == "exp") h = [a, b](double x) { return a * std::sqrt(x) + b; };
  psiest::RealFn F = [f, h](double x) { return f(h(x)); };
  psiest::BajraktarevicSpec s;
  s.f = f;
  s.p = p;
  s.F = F;
  s.theta = theta;
  return {s, label, bounded};
}

inline std::vector<double> draw_xs(Rng& rng, int max_n) {
  std::vector<double> xs(rng.integer(1, max_n));
  for (auto& x : xs) x = rng.uniform(0.1, 5.0);
  return xs;
}

inline psiest::MobiusCoefficients draw_mobius(Rng& rng, bool allow_c) {
  psiest::MobiusCoefficients m;
  m.a = rng.uniform(0.5, 2.0);
  m.c = allow_c ? rng.uniform(0.0, 2.0) : 0.0;
  m.d = rng.uniform(0.5, 2.0);
  m.b = rng.uniform(-2.0, 2.0);
  if (m.a * m.d - m.b * m.c < 0.1) m.b = 0.0;
  return m;
}

// ---------------------------------------------------------------------------
// Oracles

// Exact weighted expectile: the sum is piecewise linear in t, so find the
// segment between sorted observations where it changes sign and solve the
// linear equation there.
inline double oracle_expectile(double alpha, std::vector<double> xs,
                               std::vector<double> ws) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  const auto sum_at = [&](double t) {
    long double s = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const long double d = xs[i] - t;
      s += ws[i] * (d > 0 ? alpha * d : (1 - alpha) * d);
    }
    return s;
  };
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    const double a = xs[order[k]];
    const double b = xs[order[k + 1]];
    if (a == b) continue;
    const long double sa = sum_at(a);
    const long double sb = sum_at(b);
    if (sa >= 0 && sb <= 0) {
      if (sa == 0) return a;
      if (sb == 0) return b;
      return static_cast<double>(a + (b - a) * sa / (sa - sb));
    }
  }
  if (xs[order.front()] == xs[order.back()]) return xs[order.front()];
  return std::nan("");
}

// Plain bisection in long double on [lo, hi] for a function that is positive
// at lo and non-positive at hi. Deliberately simple; no bracket search.
template <typename F>
double oracle_bisect(F h, long double lo, long double hi, int steps = 200) {
  for (int i = 0; i < steps; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (h(static_cast<double>(mid)) > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return static_cast<double>(0.5L * (lo + hi));
}

// 4x4 determinant by the Leibniz formula.
inline double oracle_det4(const double m[4][4]) {
  int perm[4] = {0, 1, 2, 3};
  long double total = 0;
  do {
    int inversions = 0;
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) inversions += perm[i] > perm[j];
    }
    long double prod = 1;
    for (int i = 0; i < 4; ++i) prod *= m[i][perm[i]];
    total += (inversions % 2 ? -prod : prod);
  } while (std::next_permutation(perm, perm + 4));
  return static_cast<double>(total);
}

// Values computed with mpmath by tests/oracles/mpmath_reference.py; the
// oracle_reference ctest keeps the file and the script in sync.
inline double reference(const std::string& name) {
  static const std::map<std::string, double> table = [] {
    std::map<std::string, double> t;
    std::ifstream in(PSIEST_REFERENCE_FILE);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ss(line);
      std::string key;
      std::string value;
      ss >> key >> value;
      t[key] = std::stod(value);
    }
    return t;
  }();
  const auto it = table.find(name);
  if (it == table.end()) throw std::runtime_error("no reference value " + name);
  return it->second;
}

}  // namespace testsupport
