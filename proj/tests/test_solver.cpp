#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "psiest/error.hpp"
#include "psiest/families.hpp"
#include "psiest/solver.hpp"
#include "support.hpp"

using namespace psiest;
namespace fam = psiest::families;

namespace {

double step_f(double t) {
  if (t <= 1.0) return t;
  if (t <= 2.0) return t + 1.0;
  return t + 2.0;
}

}  // namespace

TEST_CASE("solve_sign_change examples") {
  const auto e = make_kernel(fam::expectile(0.5));
  const auto r = solve_sign_change(e, WeightedSample::uniform({1, 2, 3}));
  REQUIRE(r.converged());
  CHECK(std::abs(r.theta - 2.0) <= 1e-10);

  const auto nv = make_kernel(fam::normal_var(0.0));
  const auto r2 = solve_sign_change(nv, WeightedSample::uniform({1, -1, 2}));
  REQUIRE(r2.converged());
  CHECK(std::abs(r2.theta - 2.0) <= 1e-10);

  const auto gs = make_kernel(fam::gamma_shape(1.0));
  const auto r3 = solve_sign_change(gs, WeightedSample::uniform({1}));
  REQUIRE(r3.converged());
  CHECK(std::abs(r3.theta - testsupport::reference("digamma_root")) <= 1e-10);
}

TEST_CASE("converged bracket invariants") {
  testsupport::Rng rng(11);
  for (Family f : all_families()) {
    for (int rep = 0; rep < 30; ++rep) {
      const auto d = testsupport::draw(rng, f, 12);
      const auto k = make_kernel(d.spec);
      const auto s = WeightedSample::uniform(d.xs);
      const auto r = solve_sign_change(k, s);
      REQUIRE_MESSAGE(r.converged(), k.name);
      CHECK(weighted_sum(k, s, r.bracket_lo) > 0.0);
      CHECK(weighted_sum(k, s, r.bracket_hi) <= 0.0);
      CHECK(r.bracket_lo <= r.theta);
      CHECK(r.theta <= r.bracket_hi);
      const double width = r.bracket_hi - r.bracket_lo;
      const double tol = SolverConfig{}.width_tol(std::max(std::abs(r.bracket_lo),
                                                           std::abs(r.bracket_hi)));
      CHECK((width <= tol ||
             std::nextafter(r.bracket_lo, r.bracket_hi) == r.bracket_hi));
    }
  }
}

TEST_CASE("solver matches independent bisection oracle") {
  testsupport::Rng rng(12);
  for (Family f : all_families()) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto d = testsupport::draw(rng, f, 12);
      const auto k = make_kernel(d.spec);
      const auto s = WeightedSample::uniform(d.xs);
      double lo = kInf;
      double hi = -kInf;
      for (double x : d.xs) {
        const double t1 = theta1(k, x);
        lo = std::min(lo, t1);
        hi = std::max(hi, t1);
      }
      const double pad = 1e-6 * std::max(1.0, std::abs(hi - lo));
      double a = lo - pad;
      double b = hi + pad;
      if (!k.theta.contains(a)) a = std::nextafter(k.theta.lo(), kInf) + 0.5 * (lo - k.theta.lo());
      const double expect = testsupport::oracle_bisect(
          [&](double t) { return weighted_sum(k, s, t); }, a, b);
      const auto r = solve_sign_change(k, s);
      REQUIRE(r.converged());
      CHECK_MESSAGE(std::abs(r.theta - expect) <= 1e-9 * std::max(1.0, std::abs(expect)),
                    k.name);
    }
  }
}

TEST_CASE("expectile solver matches exact piecewise-linear oracle") {
  testsupport::Rng rng(13);
  for (int rep = 0; rep < 300; ++rep) {
    const double alpha = rng.uniform(0.05, 0.95);
    const int n = rng.integer(1, 20);
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) xs.push_back(rng.uniform(-10, 10));
    const auto ws = testsupport::random_weights(rng, xs.size());
    const auto r = solve_sign_change(make_kernel(fam::expectile(alpha)), WeightedSample(xs, ws));
    REQUIRE(r.converged());
    const double expect = testsupport::oracle_expectile(alpha, xs, ws);
    CHECK(std::abs(r.theta - expect) <= 1e-10);
  }
}

TEST_CASE("theta1 examples") {
  CHECK(theta1(make_kernel(fam::expectile(0.3)), 7.0) == 7.0);
  CHECK(theta1(make_kernel(fam::lomax_shape_alpha(1.0)), std::exp(1.0) - 1.0) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(theta1(make_kernel(fam::beta_alpha(1.0)), 1.0 - std::exp(-1.0)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  // no closed form: solved
  CHECK(std::abs(theta1(make_kernel(fam::gamma_shape(1.0)), 1.0) -
                 testsupport::reference("digamma_root")) <= 1e-10);
}

TEST_CASE("generalized_left_inverse examples") {
  const auto cube = [](double t) { return t * t * t; };
  CHECK(std::abs(generalized_left_inverse(cube, OpenInterval::real_line(), 8.0) - 2.0) <= 1e-10);
  // y = 1.5 falls in the jump gap (1, 2] at t0 = 1
  CHECK(std::abs(generalized_left_inverse(step_f, OpenInterval::real_line(), 1.5) - 1.0) <= 1e-10);
  const auto ln = [](double t) { return std::log(t); };
  CHECK(std::abs(generalized_left_inverse(ln, OpenInterval::positive_half_line(), 0.0) - 1.0) <=
        1e-10);
  // g o f = id on theta
  for (double t : {-3.0, 0.5, 1.0, 1.7, 2.0, 4.0}) {
    CHECK(std::abs(generalized_left_inverse(step_f, OpenInterval::real_line(), step_f(t)) - t) <=
          1e-9 * (1 + std::abs(t)));
  }
  try {
    generalized_left_inverse(ln, OpenInterval(1.0, 2.0), 5.0);
    FAIL("expected OutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kOutOfRange);
  }
}

TEST_CASE("property: left-inverse contract") {
  testsupport::Rng rng(14);
  struct Case {
    RealFn f;
    OpenInterval theta;
  };
  const std::vector<Case> cases = {
      {[](double t) { return t * t * t; }, OpenInterval::real_line()},
      {[](double t) { return std::log(t); }, OpenInterval::positive_half_line()},
      {[](double t) { return std::exp(t); }, OpenInterval(-5.0, 5.0)},
      {step_f, OpenInterval::real_line()},
  };
  for (const auto& c : cases) {
    std::vector<double> ys;
    for (int i = 0; i < 1000; ++i) ys.push_back(c.f(c.theta.from_unit(rng.uniform(0.02, 0.98))));
    std::sort(ys.begin(), ys.end());
    double prev = -kInf;
    for (double y : ys) {
      const double g = generalized_left_inverse(c.f, c.theta, y);
      CHECK(std::abs(c.f(g) - y) <= 1e-9 * (1 + std::abs(y)));
      CHECK(g >= prev);
      prev = g;
    }
  }
}

TEST_CASE("property: mean-type and degenerate samples") {
  testsupport::Rng rng(15);
  const SolverConfig cfg;
  for (Family f : all_families()) {
    for (int rep = 0; rep < 40; ++rep) {
      const auto d = testsupport::draw(rng, f, 15);
      const auto k = make_kernel(d.spec);
      const auto s = WeightedSample(d.xs, testsupport::random_weights(rng, d.xs.size()));
      const auto r = solve_sign_change(k, s, cfg);
      REQUIRE(r.converged());
      double lo = kInf;
      double hi = -kInf;
      for (double x : d.xs) {
        lo = std::min(lo, theta1(k, x, cfg));
        hi = std::max(hi, theta1(k, x, cfg));
      }
      const double tol = 2 * cfg.width_tol(std::max(std::abs(lo), std::abs(hi)));
      CHECK(r.theta >= lo - tol);
      CHECK(r.theta <= hi + tol);
      if (hi - lo > 1e-6 * std::max(1.0, std::abs(hi))) {
        CHECK(r.theta > lo + tol);
        CHECK(r.theta < hi - tol);
      }
      // [x, x, ..., x]
      const double x = d.xs.front();
      const auto rx = solve_sign_change(k, WeightedSample::uniform(std::vector<double>(5, x)), cfg);
      const double t1 = theta1(k, x, cfg);
      CHECK(std::abs(rx.theta - t1) <= 2 * cfg.width_tol(t1) + 1e-15);
    }
  }
}

TEST_CASE("property: weight-scale invariance") {
  testsupport::Rng rng(16);
  const SolverConfig cfg;
  for (Family f : all_families()) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto d = testsupport::draw(rng, f, 10);
      const auto k = make_kernel(d.spec);
      auto w = testsupport::random_weights(rng, d.xs.size());
      const auto r1 = solve_sign_change(k, WeightedSample(d.xs, w), cfg);
      const double c = rng.uniform(0.1, 10.0);
      for (auto& v : w) v *= c;
      const auto r2 = solve_sign_change(k, WeightedSample(d.xs, w), cfg);
      CHECK(std::abs(r1.theta - r2.theta) <= 2 * cfg.width_tol(r1.theta));
    }
  }
}

TEST_CASE("property: limit lemma for expectiles") {
  const auto k = make_kernel(fam::expectile(0.3));
  double prev = kInf;
  std::vector<double> gaps;
  for (int n = 1; n <= 64; ++n) {
    const auto r = solve_sign_change(k, WeightedSample({0.0, 1.0}, {double(n), 1.0}));
    const double gap = std::abs(r.theta);
    gaps.push_back(gap);
    CHECK(gap < prev);
    prev = gap;
  }
  // fitted C = max n * gap
  double c = 0.0;
  for (int n = 1; n <= 64; ++n) c = std::max(c, n * gaps[n - 1]);
  for (int n = 1; n <= 64; ++n) CHECK(gaps[n - 1] <= c / n + 1e-12);
}

TEST_CASE("property: two-observation estimates are dense in the hull (Beta alpha)") {
  const auto k = make_kernel(fam::beta_alpha(1.5));
  const double x = 0.3;
  const double y = 0.8;
  const auto max_gap = [&](int km) {
    std::vector<double> pts = {theta1(k, x), theta1(k, y)};
    for (int a = 1; a < km; ++a) {
      pts.push_back(solve_sign_change(k, WeightedSample({x, y}, {double(a), double(km - a)})).theta);
    }
    std::sort(pts.begin(), pts.end());
    double gap = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) gap = std::max(gap, pts[i] - pts[i - 1]);
    return gap;
  };
  const double range = theta1(k, x) - theta1(k, y);
  const double g40 = max_gap(40);
  const double g400 = max_gap(400);
  CHECK(g400 < g40 / 5.0);
  CHECK(g400 <= range / 50.0);
}

TEST_CASE("solver failures are reported, not thrown") {
  // psi > 0 everywhere: no negative part
  PsiKernel k{"positive", OpenInterval::real_line(), [](double, double) { return 1.0; },
              std::nullopt, std::nullopt, nullptr};
  SolverConfig cfg;
  cfg.max_expand = 30;
  const auto r = solve_sign_change(k, WeightedSample::uniform({0}), cfg);
  CHECK(r.status == SolveStatus::kNoNegativePart);
  PsiKernel k2{"negative", OpenInterval::real_line(), [](double, double) { return -1.0; },
               std::nullopt, std::nullopt, nullptr};
  CHECK(solve_sign_change(k2, WeightedSample::uniform({0}), cfg).status ==
        SolveStatus::kNoPositivePart);
  try {
    theta1(k, 0.0, cfg);
    FAIL("expected SolverFailure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kSolverFailure);
  }
}

TEST_CASE("discontinuous kernel: sign change without a zero") {
  // jumps from +1 to -1 at t = 0.25
  PsiKernel k{"jump", OpenInterval::real_line(),
              [](double, double t) { return t < 0.25 ? 1.0 : -1.0; }, std::nullopt,
              std::nullopt, nullptr};
  const auto r = solve_sign_change(k, WeightedSample::uniform({0}));
  REQUIRE(r.converged());
  CHECK(std::abs(r.theta - 0.25) <= 1e-12);
}

TEST_CASE("SolverConfig validation") {
  SolverConfig cfg;
  cfg.abs_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
