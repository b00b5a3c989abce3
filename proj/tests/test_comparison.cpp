#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "support/generators.hpp"
#include "wiss/comparison.hpp"

using namespace wiss;
using doctest::Approx;

namespace {
CompFn two_slope() { return CompFn({{0.0, 0.0}, {1.0, 2.0}}, 2.0); }
}  // namespace

TEST_CASE("eval interpolates and extends by the tail") {
  const auto f = two_slope();
  CHECK(eval(f, 0.0) == 0.0);
  CHECK(eval(f, 0.5) == Approx(1.0));
  CHECK(eval(f, 3.0) == Approx(6.0));
  CHECK_THROWS_AS(eval(f, -0.1), std::domain_error);

  const DecayFn d({{0.0, 4.0}, {1.0, 2.0}}, 1.0);
  CHECK(eval(d, 2.0) == Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(eval(d, 0.5) == Approx(3.0));
}

TEST_CASE("inverse") {
  const auto f = two_slope();
  CHECK(inverse(f, 2.0) == 1.0);
  CHECK(inverse(f, 1.0) == Approx(0.5));
  CHECK(inverse(CompFn::identity(), 3.7) == Approx(3.7));
  CHECK(inverse(f, 10.0) == Approx(5.0));
  CHECK_THROWS_AS(inverse(f, -1.0), std::domain_error);
}

TEST_CASE("construction rejects invalid shapes") {
  CHECK_THROWS_AS(CompFn({{0.0, 0.1}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(CompFn({{0.0, 0.0}, {1.0, 1.0}, {2.0, 1.0}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(CompFn({{0.0, 0.0}}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(DecayFn({{0.0, 1.0}, {1.0, 1.0}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(DecayFn({{0.0, 1.0}}, -1.0), std::invalid_argument);
}

TEST_CASE("asymptotic gain from a limit gain") {
  const auto id = CompFn::identity();
  const auto g = asymptotic_gain_from_limit(id, id, id);
  for (double r : {0.0, 1.0, 2.0}) CHECK(g(r) == Approx(3.0 * r));
  const auto g2 = asymptotic_gain_from_limit(CompFn::linear(2.0), id, id);
  for (double r : {0.0, 0.5, 1.0, 7.0}) CHECK(g2(r) == Approx(5.0 * r));
  CHECK(limit_tolerance(CompFn::linear(2.0), 1.0) == Approx(0.25));
}

TEST_CASE("envelope comparison pair") {
  const auto [sigma, gamma] =
      envelope_comparison_pair(CompFn::identity(), CompFn::identity(), CompFn::linear(2.0));
  CHECK(sigma(1.0) == Approx(2.0));
  CHECK(gamma(1.0) == Approx(2.0));

  // 2r up to 1, then slope 0.5; crosses the identity at r = 3.
  const CompFn bent({{0.0, 0.0}, {1.0, 2.0}}, 0.5);
  const auto [s2, g2] = envelope_comparison_pair(CompFn::identity(), bent, CompFn::identity());
  (void)s2;
  for (double r : {0.25, 1.0, 2.0, 3.0, 4.5, 10.0})
    CHECK(g2(r) == Approx(std::max(bent(r), r)).epsilon(1e-12));
}

TEST_CASE("fit_k_upper") {
  const std::vector<Breakpoint> a{{1.0, 1.0}, {2.0, 0.5}};
  const auto f = fit_k_upper(a);
  CHECK(f(1.0) >= 1.0);
  CHECK(f(2.0) >= 1.0);

  const std::vector<Breakpoint> zero{{0.0, 0.0}};
  const auto z = fit_k_upper(zero);
  CHECK(z(1.0) == Approx(kSlopeEpsilon));

  const std::vector<Breakpoint> dup{{1.0, 1.0}, {1.0, 2.0}};
  CHECK(fit_k_upper(dup)(1.0) >= 2.0);

  CHECK_THROWS(fit_k_upper(std::vector<Breakpoint>{}));
  CHECK_THROWS_AS(fit_k_upper(std::vector<Breakpoint>{{0.0, 1.0}}), std::domain_error);
}

TEST_CASE("csv round trip") {
  const CompFn f({{0.0, 0.0}, {0.3, 0.1}, {1.0, 2.0 / 3.0}}, 0.7);
  std::stringstream ss;
  write_csv(ss, "sigma", f);
  std::string name;
  const auto g = read_comp_fn(ss, &name);
  CHECK(name == "sigma");
  CHECK(g.tail_slope() == f.tail_slope());
  REQUIRE(g.breakpoints().size() == f.breakpoints().size());
  for (std::size_t i = 0; i < f.breakpoints().size(); ++i) CHECK(g.breakpoints()[i].y == f.breakpoints()[i].y);

  const DecayFn d({{0.0, 2.0}, {1.5, 1.0}}, 0.25);
  std::stringstream ds;
  write_csv(ds, "beta", d);
  const auto e = read_decay_fn(ds);
  CHECK(e(4.0) == d(4.0));
}

TEST_CASE("property: monotonicity, inverse round trip, doubling surrogate") {
  for (unsigned i = 0; i < 200; ++i) {
    auto g = testing::rng_for(11, i);
    const auto f = testing::random_comp_fn(g);
    const double a = testing::uniform(g, 0.0, 8.0);
    const double b = testing::uniform(g, 0.0, 8.0);
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (lo < hi) CHECK(f(lo) < f(hi));
    const double y = testing::uniform(g, 0.0, 20.0);
    CHECK(f(f.inverse(y)) == Approx(y).epsilon(1e-12));
    CHECK(f(a + b) <= f(2.0 * a) + f(2.0 * b));
  }
}

TEST_CASE("property: composed gains are class K") {
  for (unsigned i = 0; i < 100; ++i) {
    auto g = testing::rng_for(12, i);
    const auto s = testing::random_comp_fn(g);
    const auto gl = testing::random_comp_fn(g);
    const auto gu = testing::random_comp_fn(g);
    const auto c = asymptotic_gain_from_limit(s, gl, gu);
    const auto [sigma, gamma] = envelope_comparison_pair(s, gl, gu);
    CHECK(c(0.0) == 0.0);
    for (int k = 0; k < 20; ++k) {
      const double r = testing::uniform(g, 0.0, 10.0);
      CHECK(c(r) == Approx(s(2.0 * gu(r)) + gl(r)).epsilon(1e-10));
      CHECK(gamma(r) == Approx(std::max(gl(r), gu(r))).epsilon(1e-10));
      CHECK(sigma(r) == Approx(2.0 * s(r)).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: fit majorizes samples") {
  for (unsigned i = 0; i < 100; ++i) {
    auto g = testing::rng_for(13, i);
    std::vector<Breakpoint> pts;
    const int n = std::uniform_int_distribution<int>(1, 40)(g);
    for (int k = 0; k < n; ++k) pts.push_back({testing::uniform(g, 0.01, 5.0), testing::uniform(g, 0.0, 3.0)});
    const auto f = fit_k_upper(pts);
    for (const auto& p : pts) CHECK(f(p.x) >= p.y);
  }
}
