#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "support/generators.hpp"
#include "wiss/testers.hpp"

using namespace wiss;
using doctest::Approx;

namespace {

ModulatedLinear scalar_decay(Modulation alpha, InputSpaceSpec space) {
  return {DiagonalSemigroup(Eigen::VectorXd::Constant(1, -1.0)), std::move(alpha), space};
}

Trajectory exponential(double dt, double horizon) {
  Trajectory traj;
  const auto n = static_cast<long>(std::lround(horizon / dt));
  for (long k = 0; k <= n; ++k) {
    traj.times.push_back(dt * static_cast<double>(k));
    traj.norms.push_back(std::exp(-traj.times.back()));
  }
  return traj;
}

Eigen::VectorXd vec1(double x) { return Eigen::VectorXd::Constant(1, x); }

}  // namespace

TEST_CASE("time bound arithmetic") {
  CHECK(modulated_time_bound(2.0, 0.5, 3.0, 1.0, kInfinity) == Approx(4.0));
  CHECK(modulated_time_bound(3.0, 1.0, 2.0, 1.0, 2.0) == Approx(7.0));
  CHECK_THROWS_AS(modulated_time_bound(1.0, 0.0, 1.0, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("weak gain and limit times on the exponential") {
  const auto traj = exponential(0.001, 10.0);
  const auto ag = weak_ag_time(traj, 0.1, 0.0);
  const auto lim = weak_limit_time(traj, 0.1, 0.0);
  REQUIRE(ag);
  REQUIRE(lim);
  CHECK(std::abs(*ag - std::log(10.0)) <= 0.001 + 1e-12);
  CHECK(std::abs(*lim - std::log(10.0)) <= 0.001 + 1e-12);
  CHECK_FALSE(weak_ag_time(traj, 1e-6, 0.0));

  // Monotone in eps; the limit time never exceeds the gain time.
  double prev = 0.0;
  for (double eps : {0.5, 0.1, 0.05, 0.01}) {
    const double t = *weak_ag_time(traj, eps, 0.0);
    CHECK(t >= prev);
    CHECK(*weak_limit_time(traj, eps, 0.0) <= t);
    prev = t;
  }
}

TEST_CASE("zero state and zero input give zero times") {
  const SystemConfig cfg = scalar_decay(Modulation::power(1.0), {2.0, FullLp{}});
  const Signal none = Signal::zero(0.01);
  CHECK(*weak_ag_time(cfg, 0.1, vec1(0.0), none, Gain::zero(), 5.0, 2.0) == 0.0);
  CHECK(*weak_limit_time(cfg, 0.1, vec1(0.0), none, Gain::zero(), 5.0, 2.0) == 0.0);
}

TEST_CASE("weak gain times are finite for alpha-divergent inputs") {
  const SystemConfig cfg = scalar_decay(Modulation::power(1.0), {2.0, AlphaDivergent{1.0}});
  const Signal u = make_alpha_divergent(2.0, 1.0, 1.0, 0.01);
  for (double eps : {1.0, 0.1, 0.01}) {
    const auto t = weak_ag_time(cfg, eps, vec1(3.0), u, Gain::zero(), 400.0, 2.0);
    REQUIRE(t);
    CHECK(std::isfinite(*t));
  }
}

TEST_CASE("strong gain attack") {
  const auto cfg = scalar_decay(Modulation::power(1.0), {2.0, AlphaDivergent{1.0}});
  const Signal u0 = make_alpha_divergent(2.0, 1.0, 1.0, 0.01);
  const Gain id = CompFn::linear(1.0);
  const auto v = strong_ag_attack(cfg, vec1(1.0), u0, id);
  CHECK(v.status == VerdictStatus::Falsified);
  REQUIRE(v.counterexample);
  REQUIRE(v.series.size() == 4);
  const double norm_u0 = lp_norm(u0, 2.0);
  const double x0 = 1.0 + norm_u0 + 1.0;
  for (const auto& [tau, margin] : v.series) {
    // Delaying the input keeps its norm; the state is frozen until tau.
    CHECK(margin == Approx(x0 - 1.0 - norm_u0).epsilon(1e-9));
  }
  const auto& cx = *v.counterexample;
  const double replayed = replay(cfg, cx);
  CHECK(replayed >= 0.99 * cx.margin);
  CHECK(std::abs(state_norm(flow(cfg, cx.t, cx.x0, cx.u)) - x0) <= 1e-12);

  AttackOptions wide;
  wide.pad = 5.0;
  const auto v2 = strong_ag_attack(cfg, vec1(-1.0), u0, id, wide);
  CHECK(v2.counterexample->margin == Approx(cx.margin + 4.0));

  const auto positive = scalar_decay(Modulation::affine(1.0, 1.0), {2.0, FullLp{}});
  CHECK_THROWS_AS(strong_ag_attack(positive, vec1(1.0), u0, id), std::invalid_argument);
}

TEST_CASE("dilation needed") {
  const DiagonalSemigroup s(Eigen::Vector2d(-1.0, -0.5));
  const Eigen::VectorXd x = Eigen::Vector2d(0.0, 2.0);
  // 2 e^{-v/2} = 0.5  <=>  v = 2 ln 4
  CHECK(dilation_needed(s, x, 0.5) == Approx(2.0 * std::log(4.0)).epsilon(1e-6));
  CHECK(dilation_needed(s, x, 3.0) == 0.0);
  const DiagonalSemigroup frozen(Eigen::Vector2d(0.0, -1.0));
  CHECK_THROWS(dilation_needed(frozen, Eigen::Vector2d(1.0, 0.0), 0.5));
}

TEST_CASE("strong gain witness for affine modulation") {
  const auto cfg = scalar_decay(Modulation::affine(1.0, 1.0), {2.0, FullLp{}});
  const Eigen::VectorXd x0 = vec1(2.0);
  const auto st = strong_ag_witness_modulated(cfg, 0.1, x0);
  CHECK(st.c == Approx(1.0));
  CHECK(st.r_bar == 2.0);
  CHECK(st.v_bar == Approx(std::log(20.0)).epsilon(1e-6));
  CHECK(st.tau_bar == Approx(st.v_bar + 4.0));

  // Quadrature oracle: every input of norm at most r̄ accumulates v̄ by τ̄.
  const double dt = 0.01;
  const auto steps = static_cast<Eigen::Index>(std::ceil(st.tau_bar / dt)) + 1;
  for (unsigned i = 0; i < 200; ++i) {
    auto g = testing::rng_for(11, i);
    Signal u = testing::random_signal(g, dt, steps, testing::uniform(g, 0.1, 5.0), false);
    const double norm = lp_norm(u, 2.0);
    Eigen::VectorXd w(steps);
    for (Eigen::Index k = 0; k < steps; ++k) w(k) = u.sample_scalar(k) * st.r_bar / norm;
    u = Signal::scalar(dt, w);
    double v = 0.0;
    for (Eigen::Index k = 0; k + 1 < steps; ++k)
      v += 0.5 * dt * (1.0 + std::abs(w(k)) + 1.0 + std::abs(w(k + 1)));
    CHECK(v >= st.v_bar);
  }

  const auto frozen = scalar_decay(Modulation::power(1.0), {2.0, FullLp{}});
  CHECK_THROWS_AS(strong_ag_witness_modulated(frozen, 0.1, x0), std::invalid_argument);
  const auto quad = scalar_decay(Modulation::affine(0.5, 2.0), {kInfinity, FullLp{}});
  const auto sti = strong_ag_witness_modulated(quad, 0.1, x0);
  CHECK(sti.c == Approx(0.5));
  CHECK(sti.tau_bar == Approx(sti.v_bar / 0.5));
}

TEST_CASE("stability bound checker") {
  const SystemConfig cfg = scalar_decay(Modulation::power(1.0), {2.0, FullLp{}});
  std::vector<StabilitySample> samples;
  for (unsigned i = 0; i < 16; ++i) {
    auto g = testing::rng_for(5, i);
    samples.push_back({vec1(testing::uniform(g, -3.0, 3.0)), testing::random_signal(g, 0.01, 200, 2.0, true)});
  }
  const auto ok = check_stability_bound(cfg, Property::UGS, CompFn::linear(1.0), CompFn::linear(1e-3), samples,
                                        5.0, 2.0);
  CHECK(ok.status == VerdictStatus::Witnessed);
  const auto bad = check_stability_bound(cfg, Property::UGS, CompFn::linear(0.5), CompFn::linear(1e-3), samples,
                                         5.0, 2.0);
  CHECK(bad.status == VerdictStatus::Falsified);
  REQUIRE(bad.counterexample);
  CHECK(replay(cfg, *bad.counterexample) >= 0.99 * bad.counterexample->margin);
}

TEST_CASE("UGS estimate on a contraction") {
  const SystemConfig cfg = scalar_decay(Modulation::power(1.0), {2.0, FullLp{}});
  UgsPlan plan;
  plan.horizon = 5.0;
  for (double r : {0.5, 1.0, 2.0, 4.0}) plan.initial_states.push_back(vec1(r));
  for (unsigned i = 0; i < 8; ++i) {
    auto g = testing::rng_for(8, i);
    plan.inputs.push_back(testing::random_signal(g, 0.01, 100, 1.0, false));
    plan.held_out.push_back({vec1(testing::uniform(g, -3.0, 3.0)), testing::random_signal(g, 0.01, 100, 1.0, false)});
  }
  const auto v = estimate_ugs(cfg, plan);
  CHECK(v.status == VerdictStatus::Witnessed);
  REQUIRE(v.fitted.size() == 2);
  CHECK(v.fitted[0].second(2.0) == Approx(2.0).epsilon(1e-6));
  CHECK(v.fitted[1].second(1.0) <= 1e-6);

  plan.held_out.clear();
  CHECK(estimate_ugs(cfg, plan).status == VerdictStatus::Inconclusive);
}

TEST_CASE("uniform gain probe on the semilinear family") {
  double prev = 0.0;
  for (Eigen::Index n : {8, 16, 32}) {
    const SystemConfig cfg = SemilinearSaturation::standard(n, 0.01);
    const double r = 0.5;
    const double sup = uniform_ag_probe(cfg, r, 2.0, 4, 3, 0.01);
    CHECK(sup == Approx(r * std::exp(-2.0 / static_cast<double>(n))).epsilon(1e-3));
    CHECK(sup > prev);
    prev = sup;
    CHECK(uniform_ag_probe(cfg, r, 0.0, 4, 3, 0.01) == Approx(r));
  }
}

TEST_CASE("vanishing shift time") {
  const Signal u = Signal::scalar(0.01, Eigen::VectorXd::Constant(101, 1.0), ExpTail{1.0, 1.0, 1.0});
  const Gain id = CompFn::linear(1.0);
  // ‖u(· + t)‖_2 = e^{-(t-1)} / √2 for t ≥ 1.
  const double t0 = vanishing_shift_time(u, 2.0, id, 0.1);
  const double exact = 1.0 + std::log(1.0 / (0.1 * std::sqrt(2.0)));
  CHECK(std::abs(t0 - exact) <= 0.01 + 1e-6);
  CHECK(vanishing_shift_time(Signal::zero(0.01), 2.0, id, 0.1) == 0.0);
}

TEST_CASE("wAG implies wAG0 on contractions") {
  const SystemConfig cfg = scalar_decay(Modulation::affine(1.0, 1.0), {2.0, FullLp{}});
  std::vector<Wag0Sample> samples;
  for (unsigned i = 0; i < 8; ++i) {
    auto g = testing::rng_for(21, i);
    samples.push_back({vec1(testing::uniform(g, -3.0, 3.0)), testing::random_signal(g, 0.01, 300, 1.0, true)});
  }
  samples.push_back({vec1(2.0), Signal::zero(0.01)});
  const auto rep = wag_implies_wag0_check(cfg, samples, {1.0, 0.1, 0.01}, CompFn::linear(1.0), 30.0);
  CHECK(rep.passed);
  CHECK(rep.min_margin >= 0.0);
  CHECK(rep.outcomes.back().t0 == 0.0);

  const SystemConfig linf = scalar_decay(Modulation::affine(1.0, 1.0), {kInfinity, FullLp{}});
  CHECK_THROWS_AS(wag_implies_wag0_check(linf, samples, {1.0}, CompFn::linear(1.0), 10.0), std::invalid_argument);
}

TEST_CASE("verdict serialization") {
  PropertyVerdict v;
  v.property = Property::SAG;
  v.status = VerdictStatus::Falsified;
  v.counterexample = Counterexample{State(vec1(2.0)), Signal::zero(0.1), 1.5, 1.0, 1.0};
  std::ostringstream report, csv;
  write_report(report, {v});
  write_verdicts_csv(csv, {v});
  CHECK(report.str().find("status: falsified") != std::string::npos);
  CHECK(csv.str() == "property,status,horizon,budget,t,bound,margin\nsAG,falsified,0,0,1.5,1,1\n");
}
