#include "psiest/bajraktarevic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "psiest/error.hpp"
#include "psiest/format.hpp"

namespace psiest {

namespace {

constexpr std::size_t kMonotoneGrid = 513;
constexpr int kMonotonePairs = 100;
constexpr std::uint64_t kMonotoneSeed = 0x5eedULL;
constexpr double kDerivFloor = 1e-8;
constexpr double kFitTol = 1e-8;

bool sampled_increasing(const RealFn& f, const OpenInterval& theta) {
  const auto grid = theta.interior_grid(kMonotoneGrid);
  double prev = f(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    if (!(v > prev)) return false;
    prev = v;
  }
  std::mt19937_64 rng(kMonotoneSeed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < kMonotonePairs; ++i) {
    double u1 = unit(rng);
    double u2 = unit(rng);
    if (u1 > u2) std::swap(u1, u2);
    const double s = theta.from_unit(u1);
    const double t = theta.from_unit(u2);
    if (!(s < t) || !theta.contains(s) || !theta.contains(t)) continue;
    if (!(f(s) < f(t))) return false;
  }
  return true;
}

struct Derivs {
  double d1, d2, d3;
};

double default_step(double s) { return std::max(1e-2, 1e-2 * std::abs(s)); }

// Stencil error is O(step^2); one extrapolation step removes the leading term.
double richardson(double coarse, double fine) {
  return (4.0 * fine - coarse) / 3.0;
}

Derivs stencil(const RealFn& h, double s, double step) {
  const double hm2 = h(s - 2 * step);
  const double hm1 = h(s - step);
  const double h0 = h(s);
  const double hp1 = h(s + step);
  const double hp2 = h(s + 2 * step);
  Derivs out{};
  out.d1 = (-hp2 + 8 * hp1 - 8 * hm1 + hm2) / (12 * step);
  out.d2 = (-hp2 + 16 * hp1 - 30 * h0 + 16 * hm1 - hm2) / (12 * step * step);
  out.d3 = (hp2 - 2 * hp1 + 2 * hm1 - hm2) / (2 * step * step * step);
  return out;
}

double schwarzian_from(const Derivs& d, double s) {
  if (!(std::abs(d.d1) > kDerivFloor)) {
    throw Error(Errc::kDegenerateDerivative,
                "|h'(" + shortest_repr(s) + ")| = " + shortest_repr(d.d1));
  }
  const double r = d.d2 / d.d1;
  return d.d3 / d.d1 - 1.5 * r * r;
}

// Gaussian elimination with partial pivoting.
double det4(std::array<std::array<double, 4>, 4> m) {
  double det = 1.0;
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    }
    if (m[piv][col] == 0.0) return 0.0;
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (int r = col + 1; r < 4; ++r) {
      const double factor = m[r][col] / m[col][col];
      for (int k = col; k < 4; ++k) m[r][k] -= factor * m[col][k];
    }
  }
  return det;
}

double det3(const std::array<std::array<double, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

void BajraktarevicSpec::validate(std::span<const double> witnesses) const {
  if (!f || !p || !F) {
    throw Error(Errc::kInvalidArgument, "f, p and F are required");
  }
  if (!sampled_increasing(f, theta)) {
    throw Error(Errc::kInvalidArgument, "f is not strictly increasing on theta");
  }
  for (double x : witnesses) {
    if (domain_check && !domain_check(x)) {
      throw Error(Errc::kDomainError,
                  "witness " + shortest_repr(x) + " is not admissible");
    }
    if (!(p(x) > 0.0)) {
      throw Error(Errc::kInvalidArgument,
                  "p(" + shortest_repr(x) + ") must be positive");
    }
    try {
      generalized_left_inverse(f, theta, F(x));
    } catch (const Error& e) {
      if (e.code() != Errc::kOutOfRange) throw;
      throw Error(Errc::kInvalidArgument, "F(" + shortest_repr(x) +
                                              ") lies outside the range of f");
    }
  }
}

PsiKernel as_kernel(const BajraktarevicSpec& spec, const SolverConfig& cfg) {
  PsiKernel k{"bajraktarevic", spec.theta, nullptr, std::nullopt, std::nullopt,
              spec.domain_check};
  k.eval = [f = spec.f, p = spec.p, F = spec.F](double x, double t) {
    return p(x) * (F(x) - f(t));
  };
  k.theta1 = [f = spec.f, F = spec.F, theta = spec.theta, cfg](double x) {
    return generalized_left_inverse(f, theta, F(x), cfg);
  };
  if (spec.f_prime) {
    k.d2 = [fp = *spec.f_prime, p = spec.p](double x, double t) {
      return -p(x) * fp(t);
    };
  }
  return k;
}

double estimate(const BajraktarevicSpec& spec, const WeightedSample& sample,
                const SolverConfig& cfg) {
  double num = 0.0;
  double den = 0.0;
  const auto xs = sample.xs();
  const auto ws = sample.weights();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ws[i] == 0.0) continue;
    if (spec.domain_check && !spec.domain_check(xs[i])) {
      throw Error(Errc::kDomainError,
                  "observation " + shortest_repr(xs[i]) + " is not admissible");
    }
    const double px = spec.p(xs[i]);
    num += ws[i] * px * spec.F(xs[i]);
    den += ws[i] * px;
  }
  if (!(den > 0.0)) {
    throw Error(Errc::kInvalidArgument, "sum of w p(x) must be positive");
  }
  return generalized_left_inverse(spec.f, spec.theta, num / den, cfg);
}

void MobiusCoefficients::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) ||
      !std::isfinite(d)) {
    throw Error(Errc::kInvalidArgument, "Mobius coefficients must be finite");
  }
  if (!(det() > 0.0)) {
    throw Error(Errc::kInvalidArgument,
                "Mobius coefficients need ad > bc, got ad - bc = " +
                    shortest_repr(det()));
  }
}

namespace {

// m applied on the extended line; f may overflow to +-inf near the ends of
// theta, where the transform tends to a/c.
double apply_extended(const MobiusCoefficients& m, double v) {
  if (std::isinf(v)) return m.c != 0.0 ? m.a / m.c : std::copysign(kInf, m.a * v / m.d);
  return m.apply(v);
}

}  // namespace

BajraktarevicSpec apply_mobius(const BajraktarevicSpec& spec,
                               const MobiusCoefficients& m,
                               std::span<const double> witnesses) {
  m.validate();
  MobiusCoefficients mm = m;
  // (a,b,c,d) and its negative define the same g; pick the one with cf+d > 0.
  const auto grid = spec.theta.interior_grid(kMonotoneGrid);
  int positive = 0;
  int negative = 0;
  for (double t : grid) {
    const double den = m.c * spec.f(t) + m.d;
    if (den > 0.0) {
      ++positive;
    } else if (den < 0.0) {
      ++negative;
    } else {
      throw Error(Errc::kSignViolation,
                  "cf + d vanishes at t = " + shortest_repr(t));
    }
  }
  if (positive > 0 && negative > 0) {
    throw Error(Errc::kSignViolation, "cf + d changes sign on theta");
  }
  if (negative > 0) mm = {-m.a, -m.b, -m.c, -m.d};
  for (double x : witnesses) {
    if (!(mm.c * spec.F(x) + mm.d > 0.0)) {
      throw Error(Errc::kSignViolation,
                  "cF + d is not positive at x = " + shortest_repr(x));
    }
  }

  BajraktarevicSpec out;
  out.theta = spec.theta;
  out.domain_check = spec.domain_check;
  out.f = [f = spec.f, mm](double t) { return apply_extended(mm, f(t)); };
  out.F = [F = spec.F, mm](double x) { return apply_extended(mm, F(x)); };
  out.p = [F = spec.F, p = spec.p, mm](double x) {
    return (mm.c * F(x) + mm.d) * p(x);
  };
  if (spec.f_prime) {
    out.f_prime = [f = spec.f, fp = *spec.f_prime, mm](double t) {
      const double den = mm.c * f(t) + mm.d;
      return mm.det() * fp(t) / (den * den);
    };
  }
  return out;
}

double schwarzian(const RealFn& h, double s, double step) {
  if (step <= 0.0) step = default_step(s);
  const double coarse = schwarzian_from(stencil(h, s, step), s);
  const double fine = schwarzian_from(stencil(h, s, 0.5 * step), s);
  return richardson(coarse, fine);
}

double relative_schwarzian(const RealFn& f, const RealFn& g, double t,
                           double step) {
  if (step <= 0.0) step = default_step(t);
  const auto at = [&](double h) {
    const Derivs df = stencil(f, t, h);
    const Derivs dg = stencil(g, t, h);
    return (schwarzian_from(dg, t) - schwarzian_from(df, t)) /
           (df.d1 * df.d1);
  };
  return richardson(at(step), at(0.5 * step));
}

std::optional<MobiusFit> mobius_fit(std::span<const double> f_vals,
                                    std::span<const double> g_vals) {
  const std::size_t n = f_vals.size();
  if (n != g_vals.size()) {
    throw Error(Errc::kInvalidArgument, "f and g probe counts differ");
  }
  if (n < 4) {
    throw Error(Errc::kDegenerateProbes, "need at least 4 probes, got " +
                                             std::to_string(n));
  }
  std::vector<double> sorted(f_vals.begin(), f_vals.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(Errc::kDegenerateProbes, "f-values must be distinct");
  }

  const auto row = [&](std::size_t i) {
    const double f = f_vals[i];
    const double g = g_vals[i];
    return std::array<double, 4>{f, 1.0, -f * g, -g};
  };
  const std::array<std::array<double, 4>, 3> anchors = {row(0), row(n / 2),
                                                        row(n - 1)};
  std::array<double, 4> v{};
  double row_norms = 1.0;
  for (const auto& r : anchors) {
    row_norms *= std::hypot(std::hypot(r[0], r[1]), std::hypot(r[2], r[3]));
  }
  for (int j = 0; j < 4; ++j) {
    std::array<std::array<double, 3>, 3> minor{};
    for (int r = 0; r < 3; ++r) {
      int k = 0;
      for (int col = 0; col < 4; ++col) {
        if (col != j) minor[r][k++] = anchors[r][col];
      }
    }
    v[j] = ((j % 2 == 0) ? 1.0 : -1.0) * det3(minor);
  }
  const double norm = std::hypot(std::hypot(v[0], v[1]), std::hypot(v[2], v[3]));
  if (!(norm > 1e-14 * row_norms)) {
    throw Error(Errc::kDegenerateProbes, "anchor system is rank deficient");
  }
  for (double& c : v) c /= norm;
  // Orient so that cf + d > 0 at the first anchor.
  if (v[2] * f_vals[0] + v[3] < 0.0) {
    for (double& c : v) c = -c;
  }

  MobiusFit fit;
  fit.coeffs = {v[0], v[1], v[2], v[3]};
  for (std::size_t i = 0; i < n; ++i) {
    const double f = f_vals[i];
    const double g = g_vals[i];
    const double res = std::abs((v[2] * f + v[3]) * g - (v[0] * f + v[1]));
    const double scale = std::abs(v[2] * f * g) + std::abs(v[3] * g) +
                         std::abs(v[0] * f) + std::abs(v[1]);
    fit.max_residual = std::max(fit.max_residual, res);
    fit.scale = std::max(fit.scale, scale);
  }
  fit.scale = std::max(fit.scale, 1.0);
  if (!(fit.max_residual <= kFitTol * fit.scale)) return std::nullopt;
  return fit;
}

double determinant_test(const std::array<double, 4>& f_vals,
                        const std::array<double, 4>& g_vals) {
  std::array<std::array<double, 4>, 4> m{};
  for (int i = 0; i < 4; ++i) {
    m[0][i] = 1.0;
    m[1][i] = f_vals[i];
    m[2][i] = g_vals[i];
    m[3][i] = f_vals[i] * g_vals[i];
  }
  return det4(m);
}

double determinant_scale(const std::array<double, 4>& f_vals,
                         const std::array<double, 4>& g_vals) {
  double ones = 0.0, ff = 0.0, gg = 0.0, fg = 0.0;
  for (int i = 0; i < 4; ++i) {
    ones += 1.0;
    ff += f_vals[i] * f_vals[i];
    gg += g_vals[i] * g_vals[i];
    fg += f_vals[i] * g_vals[i] * f_vals[i] * g_vals[i];
  }
  return std::sqrt(ones) * std::sqrt(ff) * std::sqrt(gg) * std::sqrt(fg);
}

bool theta_psi_empty(const BajraktarevicSpec& spec,
                     std::span<const double> witnesses,
                     const SolverConfig& cfg) {
  if (witnesses.empty()) return true;
  double lo = kInf;
  double hi = -kInf;
  for (double x : witnesses) {
    const double t = generalized_left_inverse(spec.f, spec.theta, spec.F(x), cfg);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  return hi - lo <= 10.0 * cfg.width_tol(std::max(std::abs(lo), std::abs(hi)));
}

}  // namespace psiest
