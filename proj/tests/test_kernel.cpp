#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "psiest/error.hpp"
#include "psiest/families.hpp"
#include "psiest/kernel.hpp"
#include "support.hpp"

using namespace psiest;
namespace fam = psiest::families;

TEST_CASE("OpenInterval validation and membership") {
  CHECK_THROWS_AS(OpenInterval(1.0, 1.0), Error);
  CHECK_THROWS_AS(OpenInterval(2.0, 1.0), Error);
  CHECK_THROWS_AS(OpenInterval(std::nan(""), 1.0), Error);
  CHECK_THROWS_AS(OpenInterval(kInf, kInf), Error);

  const OpenInterval i(0.0, 1.0);
  CHECK(i.contains(0.5));
  CHECK_FALSE(i.contains(0.0));
  CHECK_FALSE(i.contains(1.0));
  CHECK(OpenInterval::real_line().contains(-1e300));
  CHECK_FALSE(OpenInterval::positive_half_line().contains(0.0));
}

TEST_CASE("interior grids stay inside and increase") {
  for (const OpenInterval& i :
       {OpenInterval(-2.0, 3.0), OpenInterval::positive_half_line(),
        OpenInterval::real_line(), OpenInterval(-kInf, -5.0)}) {
    const auto g = i.interior_grid(513);
    REQUIRE(g.size() == 513);
    for (std::size_t k = 0; k < g.size(); ++k) {
      CHECK(i.contains(g[k]));
      if (k > 0) CHECK(g[k - 1] < g[k]);
    }
    CHECK(i.contains(i.representative()));
  }
}

TEST_CASE("weighted_sum examples") {
  const auto e05 = make_kernel(fam::expectile(0.5));
  CHECK(weighted_sum(e05, WeightedSample::uniform({1, 3}), 2.0) == 0.0);
  const auto nv = make_kernel(fam::normal_var(0.0));
  CHECK(weighted_sum(nv, WeightedSample::uniform({1}), 1.0) == 0.0);
  // 0.5 * (3 * (0 - 1) + 1 * (4 - 1)) by hand
  CHECK(weighted_sum(e05, WeightedSample({0, 4}, {3, 1}), 1.0) == 0.0);
}

TEST_CASE("weighted_sum domain errors") {
  const auto nv = make_kernel(fam::normal_var(0.0));
  CHECK_THROWS_AS(weighted_sum(nv, WeightedSample::uniform({1}), -1.0), Error);
  try {
    weighted_sum(nv, WeightedSample::uniform({0.0}), 1.0);
    FAIL("expected DomainError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kDomainError);
  }
}

TEST_CASE("WeightedSample invariants") {
  CHECK_THROWS_AS(WeightedSample({}, {}), Error);
  CHECK_THROWS_AS(WeightedSample({1, 2}, {1}), Error);
  CHECK_THROWS_AS(WeightedSample({1, 2}, {0, 0}), Error);
  try {
    WeightedSample({1}, {-1});
    FAIL("expected NegativeWeight");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kNegativeWeight);
  }
  const WeightedSample s({1, 2}, {0, 2});
  CHECK(s.total_weight() == 2.0);
  CHECK_FALSE(s.is_uniform());
  CHECK(WeightedSample::uniform({4, 5, 6}).is_uniform());
}

TEST_CASE("uniform_weights") {
  CHECK(uniform_weights(3) == std::vector<double>{1, 1, 1});
  CHECK(uniform_weights(1) == std::vector<double>{1});
  try {
    uniform_weights(0);
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kInvalidArgument);
  }
}

TEST_CASE("empirical_theta1_hull") {
  const auto e = make_kernel(fam::expectile(0.3));
  const std::vector<double> w1 = {1, 2, 5};
  const auto h = empirical_theta1_hull(e, w1);
  REQUIRE(h.has_value());
  CHECK(h->lo() == 1.0);
  CHECK(h->hi() == 5.0);
  const std::vector<double> w2 = {2, 2, 2};
  CHECK_FALSE(empirical_theta1_hull(e, w2).has_value());
  // theta1(x) = alpha x for the Lomax rate kernel
  const auto lomax = make_kernel(fam::lomax_rate_lambda(2.0));
  const std::vector<double> w3 = {1, 3};
  const auto hl = empirical_theta1_hull(lomax, w3);
  REQUIRE(hl.has_value());
  CHECK(hl->lo() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(hl->hi() == doctest::Approx(6.0).epsilon(1e-15));
  try {
    const std::vector<double> w4 = {0.5};
    empirical_theta1_hull(make_kernel(fam::gamma_shape(1.0)), w4);
    FAIL("expected MissingClosedForm");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kMissingClosedForm);
  }
}

TEST_CASE("property: closed-form theta1 zeroes the kernel") {
  testsupport::Rng rng(101);
  for (Family f : all_families()) {
    const auto spec = testsupport::draw_spec(rng, f);
    const auto k = make_kernel(spec);
    if (!k.theta1) continue;
    for (int i = 0; i < 1000; ++i) {
      const double x = testsupport::draw_observation(rng, spec);
      const double t = (*k.theta1)(x);
      const double scale = std::max({1.0, std::abs(t), std::abs(x)});
      CHECK_MESSAGE(std::abs(k.eval(x, t)) <= 1e-10 * scale, k.name << " x=" << x);
    }
  }
}

TEST_CASE("property: sign invariant under weight scaling") {
  testsupport::Rng rng(202);
  for (Family f : all_families()) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto d = testsupport::draw(rng, f, 10);
      const auto k = make_kernel(d.spec);
      const auto w = testsupport::random_weights(rng, d.xs.size());
      auto w2 = w;
      const double c = rng.uniform(0.01, 100.0);
      for (auto& v : w2) v *= c;
      const WeightedSample s1(d.xs, w);
      const WeightedSample s2(d.xs, w2);
      for (double t : k.theta.interior_grid(33)) {
        const double a = weighted_sum(k, s1, t);
        const double b = weighted_sum(k, s2, t);
        CHECK((a > 0) == (b > 0));
        CHECK((a < 0) == (b < 0));
      }
    }
  }
}

TEST_CASE("property: concatenation additivity") {
  testsupport::Rng rng(303);
  for (Family f : all_families()) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto d1 = testsupport::draw(rng, f, 8);
      testsupport::Draw d2{d1.spec, {}};
      for (int i = 0; i < rng.integer(1, 8); ++i) {
        d2.xs.push_back(testsupport::draw_observation(rng, d1.spec));
      }
      const auto k = make_kernel(d1.spec);
      const WeightedSample a(d1.xs, testsupport::random_weights(rng, d1.xs.size()));
      const WeightedSample b(d2.xs, testsupport::random_weights(rng, d2.xs.size()));
      const WeightedSample ab = concat(a, b);
      for (double t : k.theta.interior_grid(17)) {
        const double lhs = weighted_sum(k, ab, t, Summation::kCompensated);
        const double rhs = weighted_sum(k, a, t, Summation::kCompensated) +
                           weighted_sum(k, b, t, Summation::kCompensated);
        // Relative to the magnitude of the terms, not of the (cancelling) sum.
        double mag = 0.0;
        for (double x : d1.xs) mag += std::abs(k.eval(x, t)) * 3.0;
        for (double x : d2.xs) mag += std::abs(k.eval(x, t)) * 3.0;
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(mag, 1e-300));
      }
    }
  }
}
