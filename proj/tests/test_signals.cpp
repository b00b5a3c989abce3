#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "support/generators.hpp"
#include "wiss/signals.hpp"

using namespace wiss;
using doctest::Approx;

namespace {

Signal indicator(double dt, double length) {
  const auto n = static_cast<Eigen::Index>(std::lround(length / dt));
  return Signal::scalar(dt, Eigen::VectorXd::Ones(n + 1));
}

Signal exp_signal(double dt, double window) {
  const auto n = static_cast<Eigen::Index>(std::lround(window / dt));
  Eigen::VectorXd v(n + 1);
  for (Eigen::Index k = 0; k <= n; ++k) v(k) = std::exp(-dt * static_cast<double>(k));
  return Signal::scalar(dt, v, ExpTail{v(n), 1.0, window});
}

}  // namespace

TEST_CASE("lp_norm examples") {
  CHECK(lp_norm(indicator(0.01, 1.0), 2.0) == Approx(1.0).epsilon(1e-3));
  CHECK(lp_norm(Signal::zero(0.1), 2.0) == 0.0);
  CHECK(lp_norm(Signal::scalar(0.1, Eigen::VectorXd::Constant(21, 3.0)), kInfinity) == 3.0);
  CHECK(lp_norm(Signal::scalar(0.1, Eigen::VectorXd::Constant(21, -3.0)), kInfinity) == 3.0);
}

TEST_CASE("lp_norm includes the analytic tail") {
  // e^{-s}: ‖·‖_2² = 1/2, ‖·‖_1 = 1.
  const auto u = exp_signal(0.001, 3.0);
  CHECK(lp_norm(u, 2.0) == Approx(std::sqrt(0.5)).epsilon(1e-6));
  CHECK(lp_norm(u, 1.0) == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("lp_norm trapezoid error is second order") {
  const double exact = std::sqrt(0.5);
  const double e1 = std::abs(lp_norm(exp_signal(0.02, 4.0), 2.0) - exact);
  const double e2 = std::abs(lp_norm(exp_signal(0.01, 4.0), 2.0) - exact);
  CHECK(e1 / e2 == Approx(4.0).epsilon(0.05));
}

TEST_CASE("shift") {
  const auto u = indicator(0.01, 1.0);
  const auto s0 = shift(u, 0.0);
  CHECK(s0.window() == u.window());
  const auto s = shift(u, 0.5);
  CHECK(s.window_end() == Approx(0.5));
  CHECK(lp_norm(s, 2.0) == Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(s.at(0.25)(0) == Approx(1.0));
  CHECK(s.at(0.75)(0) == 0.0);
  CHECK_THROWS_AS(shift(u, 0.005), std::invalid_argument);

  // Shifting past the window leaves only the tail.
  const auto e = exp_signal(0.01, 1.0);
  const auto far = shift(e, 3.0);
  CHECK(far.sample_scalar(0) == Approx(std::exp(-3.0)).epsilon(1e-12));
  CHECK(lp_norm(far, 2.0) == Approx(std::exp(-3.0) / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("concat") {
  const auto u = indicator(0.1, 1.0);
  const auto v = exp_signal(0.1, 2.0);
  const auto c0 = concat(u, v, 0.0);
  CHECK(c0.window() == v.window());
  const auto c = concat(u, v, 0.5);
  CHECK(c.sample_scalar(5) == v.sample_scalar(0));
  CHECK(c.at(0.5 + 2.7)(0) == Approx(v.at(2.7)(0)).epsilon(1e-12));

  const auto u0 = make_alpha_divergent(2.0, 1.0, 1.0, 0.1);
  const auto attack = concat(Signal::zero(0.1), u0, 7.0);
  for (Eigen::Index k = 0; k <= 70; ++k) CHECK(attack.sample_scalar(k) == 0.0);

  CHECK_THROWS_AS(concat(indicator(0.1, 1.0), indicator(0.2, 1.0), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(concat(Signal::zero(0.1, 2), indicator(0.1, 1.0), 0.0), std::invalid_argument);
}

TEST_CASE("alpha-divergent family") {
  CHECK(alpha_divergence_exponent(2.0, 1.0) == Approx(0.75));
  CHECK(alpha_divergence_exponent(1.0, 0.5) == Approx(1.5));

  const auto u = make_alpha_divergent(2.0, 1.0, 1.0, 0.01);
  CHECK(std::isfinite(lp_norm(u, 2.0)));
  CHECK(std::isinf(lp_norm(u, 1.0)));
  CHECK(admits({2.0, AlphaDivergent{1.0}}, u));

  const auto w = make_alpha_divergent(1.0, 0.5, 1.0, 0.01);
  CHECK(std::isfinite(lp_norm(w, 1.0)));
  CHECK(std::isinf(lp_norm(w, 0.5 + 0.5)) == false);
  CHECK(admits({1.0, AlphaDivergent{0.5}}, w));

  const auto c = make_alpha_divergent(kInfinity, 1.0, 2.5, 0.01);
  CHECK(lp_norm(c, kInfinity) == 2.5);
  CHECK(admits({kInfinity, AlphaDivergent{1.0}}, c));

  CHECK_THROWS_AS(make_alpha_divergent(2.0, 3.0, 1.0, 0.01), std::invalid_argument);
}

TEST_CASE("eventually exponentially decaying family") {
  const double r = 0.8;
  const auto u = make_eventually_exp_decaying(0.05, Eigen::MatrixXd::Constant(1, 201, r), r, 1.0);
  CHECK(lp_norm(u, kInfinity) == r);
  CHECK(admits({kInfinity, EventuallyExpDecaying{}}, u));
  CHECK(admits({kInfinity, EventuallyExpDecaying{}}, shift(u, 20.0)));
  CHECK(admits({kInfinity, EventuallyExpDecaying{}}, shift(u, 30.0)));

  const auto z = make_eventually_exp_decaying(0.05, Eigen::MatrixXd::Zero(1, 11), 0.0, 1.0);
  CHECK(z.is_zero());
  CHECK_THROWS_AS(make_eventually_exp_decaying(0.05, Eigen::MatrixXd::Zero(1, 11), 1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("input space validation") {
  CHECK_THROWS_AS((InputSpaceSpec{2.0, LInfty0{}}.validate()), std::invalid_argument);
  CHECK_NOTHROW((InputSpaceSpec{kInfinity, LInfty0{}}.validate()));
  CHECK_FALSE(admits({kInfinity, LInfty0{}}, make_alpha_divergent(kInfinity, 1.0, 1.0, 0.1)));
}

TEST_CASE("vector signals use the Euclidean norm pointwise") {
  Eigen::MatrixXd v(2, 11);
  v.row(0).setConstant(3.0);
  v.row(1).setConstant(4.0);
  const Signal u(0.1, v);
  CHECK(lp_norm(u, kInfinity) == Approx(5.0));
  CHECK(lp_norm(u, 2.0) == Approx(5.0));
}

TEST_CASE("csv round trip preserves samples and tail") {
  auto g = testing::rng_for(21, 0);
  const auto u = testing::random_signal(g, 0.1, 25, 2.0, true);
  std::stringstream ss;
  write_csv(ss, u);
  const auto w = read_signal_csv(ss);
  CHECK(w.window() == u.window());
  CHECK(w.dt() == u.dt());
  CHECK(lp_norm(w, 2.0) == lp_norm(u, 2.0));
  std::stringstream again;
  write_csv(again, w);
  std::stringstream first;
  write_csv(first, u);
  CHECK(again.str() == first.str());
}

TEST_CASE("property: shifts do not increase the norm") {
  for (unsigned i = 0; i < 200; ++i) {
    auto g = testing::rng_for(22, i);
    const auto u = testing::random_signal(g, 0.05, 80, 3.0, i % 2 == 0);
    const long n = std::uniform_int_distribution<long>(0, 120)(g);
    const auto s = shift(u, 0.05 * static_cast<double>(n));
    for (double p : {1.0, 2.0, 3.5, kInfinity}) CHECK(lp_norm(s, p) <= lp_norm(u, p) + 1e-9);
  }
}

TEST_CASE("property: concatenation stays in each family") {
  for (unsigned i = 0; i < 50; ++i) {
    auto g = testing::rng_for(23, i);
    const auto a = testing::random_signal(g, 0.1, 30, 1.0, true);
    const auto b = testing::random_signal(g, 0.1, 30, 1.0, true);
    const double tau = 0.1 * static_cast<double>(std::uniform_int_distribution<int>(0, 40)(g));
    CHECK(admits({2.0, FullLp{}}, concat(a, b, tau)));
    CHECK(admits({kInfinity, EventuallyExpDecaying{}}, concat(a, b, tau)));
    CHECK(admits({kInfinity, LInfty0{}}, concat(a, b, tau)));
    const auto d = make_alpha_divergent(2.0, 1.0, testing::uniform(g, 0.1, 2.0), 0.1);
    CHECK(admits({2.0, AlphaDivergent{1.0}}, concat(a, d, tau)));
  }
}

TEST_CASE("property: shifted L^p tails vanish") {
  for (unsigned i = 0; i < 20; ++i) {
    auto g = testing::rng_for(24, i);
    const auto u = testing::random_signal(g, 0.1, 50, 2.0, true);
    double prev = lp_norm(u, 2.0);
    for (int step = 1; step <= 8; ++step) {
      const double cur = lp_norm(shift(u, 10.0 * step), 2.0);
      CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
    CHECK(prev < 1e-3);
    CHECK(lp_norm(shift(u, 80.0), kInfinity) < 1e-3);
  }
}
