#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "support/generators.hpp"
#include "wiss/envelope.hpp"

using namespace wiss;
using doctest::Approx;

namespace {

Trajectory sampled(double dt, double horizon, double (*f)(double)) {
  Trajectory traj;
  const auto n = static_cast<long>(std::lround(horizon / dt));
  for (long k = 0; k <= n; ++k) {
    const double t = dt * static_cast<double>(k);
    traj.times.push_back(t);
    traj.norms.push_back(f(t));
  }
  return traj;
}

double decaying(double t) { return std::exp(-t); }
double flat(double) { return 1.0; }
double zero(double) { return 0.0; }

}  // namespace

TEST_CASE("classify") {
  CHECK(classify(sampled(0.01, 5.0, zero), 0.0).kind == EnvelopeCase::ZeroInitial);
  CHECK(classify(sampled(0.01, 10.0, decaying), 0.0).kind == EnvelopeCase::NeverSettles);
  const auto c = classify(sampled(0.01, 10.0, decaying), 0.5);
  CHECK(c.kind == EnvelopeCase::EventuallyBelow);
  CHECK(c.horizon_conditional);
  CHECK(c.tau_inf == Approx(std::log(2.0)).epsilon(1e-4));
  CHECK_FALSE(classify(sampled(0.01, 10.0, decaying), 0.5, TailPolicy::Certified).horizon_conditional);
}

TEST_CASE("compute_k") {
  CHECK(compute_k(0.7, 1.0, 0.0) == 1);
  CHECK(compute_k(0.3, 1.0, 0.0) == 3);
  CHECK(compute_k(1.2, 1.0, 0.2) == 1);
  CHECK(compute_k(0.25, 1.0, 0.0) == 4);  // tie at σx/k resolves to k
  CHECK_THROWS_AS(compute_k(1.5, 1.0, 0.2), StabilityBoundViolation);
  CHECK_THROWS_AS(compute_k(0.1, 1.0, 0.2), std::logic_error);
}

TEST_CASE("crossing times of the exponential") {
  const double dt = 0.01;
  const auto traj = sampled(dt, 12.0, decaying);
  const auto taus = crossing_times(traj, 1.0, 0.0, 1);
  CHECK(taus.front() == 0.0);
  REQUIRE(taus.size() > 6);
  for (int n = 1; n <= 5; ++n) CHECK(std::abs(taus[n] - std::log(1.0 + n)) < dt);
  for (std::size_t n = 1; n < taus.size(); ++n) CHECK(taus[n] > taus[n - 1]);
}

TEST_CASE("envelope of the exponential") {
  const auto traj = sampled(0.01, 12.0, decaying);
  const auto env = build_envelope(traj, 1.0, 0.0);
  CHECK(env.kind == EnvelopeCase::NeverSettles);
  CHECK(env.k == 1);
  CHECK(env.beta_at(0.0) == 2.0);
  CHECK(env.beta_at(env.taus[1]) == Approx(1.0).epsilon(1e-12));
  CHECK(env.taus[1] == Approx(std::log(2.0)).epsilon(1e-4));
  const auto rep = verify_item_iii(traj, env, CompFn::linear(2.0));
  CHECK(rep.passed);
  CHECK(rep.worst_beta_excess <= 0.0);
  const auto inv = check_envelope_invariants(traj, env);
  CHECK(inv.all());
  CHECK(inv.level_error <= 1e-12);
}

TEST_CASE("eventually-below envelope") {
  const auto traj = sampled(0.01, 10.0, decaying);
  const auto env = build_envelope(traj, 1.0, 0.5);
  CHECK(env.kind == EnvelopeCase::EventuallyBelow);
  CHECK(env.beta0_at(0.1) == 1.0);
  CHECK(env.beta0_at(1.0) == 0.0);
  CHECK(env.beta_at(env.taus[1]) == Approx(1.0));
  CHECK(verify_item_iii(traj, env, CompFn::linear(2.0)).passed);
  CHECK(check_envelope_invariants(traj, env).all());
}

TEST_CASE("zero initial state") {
  auto traj = sampled(0.1, 5.0, zero);
  traj.norms[10] = 0.3;  // input-driven excursion, bounded by the gain
  const auto env = build_envelope(traj, 0.0, 0.4);
  CHECK(env.kind == EnvelopeCase::ZeroInitial);
  CHECK_FALSE(env.beta.has_value());
  CHECK(env.beta_at(2.0) == 0.0);
  CHECK(verify_item_iii(traj, env, CompFn::identity()).passed);
}

TEST_CASE("failure branches") {
  CHECK_THROWS_AS(build_envelope(sampled(0.1, 5.0, flat), 1.0, 0.0), HorizonTooShort);
  CHECK_THROWS_AS(build_envelope(sampled(0.1, 5.0, decaying), 0.5, 0.0), StabilityBoundViolation);

  // A deliberately wrong β is reported with its location.
  const auto traj = sampled(0.01, 5.0, decaying);
  auto env = build_envelope(traj, 1.0, 0.0);
  env.beta = DecayFn({{0.0, 0.5}}, 1.0);
  const auto rep = verify_item_iii(traj, env, CompFn::linear(2.0));
  CHECK_FALSE(rep.passed);
  CHECK(rep.worst_time == 0.0);
  CHECK(rep.detail.find("t=0") != std::string::npos);
}

TEST_CASE("envelope csv") {
  const auto traj = sampled(0.5, 2.0, decaying);
  const auto env = build_envelope(traj, 1.0, 0.5);
  std::ostringstream os;
  write_envelope_csv(os, traj, env);
  CHECK(os.str().rfind("t,norm,beta0,beta,gain\n0,1,1,2,0.5\n", 0) == 0);
}

TEST_CASE("property: modulated trajectories admit a valid envelope") {
  const ModulatedLinear cfg{DiagonalSemigroup::strongly_stable(4), Modulation::power(1.0), {2.0, AlphaDivergent{1.0}}};
  for (unsigned i = 0; i < 24; ++i) {
    auto g = testing::rng_for(41, i);
    Eigen::VectorXd x0(4);
    for (auto& v : x0) v = testing::uniform(g, -1.0, 1.0);
    const auto prefix = testing::random_signal(g, 0.05, 40, 1.0, false);
    const auto u = concat(prefix, make_alpha_divergent(2.0, 1.0, testing::uniform(g, 0.5, 2.0), 0.05), 2.0);
    const auto traj = simulate(cfg, State(x0), u, 400.0);
    const double gain = (i % 2 == 0) ? 0.0 : 0.05 * lp_norm(u, 2.0);
    const auto env = build_envelope(traj, x0.norm(), gain);
    CHECK(verify_item_iii(traj, env, CompFn::linear(2.0)).passed);
    const auto inv = check_envelope_invariants(traj, env);
    CHECK(inv.all());
    CHECK(inv.level_error <= 1e-12);
  }
}
