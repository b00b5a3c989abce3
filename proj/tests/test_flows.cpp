#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "support/generators.hpp"
#include "wiss/flows.hpp"

using namespace wiss;
using doctest::Approx;

namespace {

ModulatedLinear scalar_modulated(Modulation alpha, InputSpaceSpec space = {2.0, FullLp{}}) {
  return {DiagonalSemigroup(Eigen::VectorXd::Constant(1, -1.0)), alpha, space};
}

SemilinearSaturation scalar_semilinear(double h) {
  return {DiagonalSemigroup(Eigen::VectorXd::Constant(1, -1.0)), Eigen::VectorXd::Ones(1), 1.0, h,
          {kInfinity, FullLp{}}};
}

LinearDuhamel inverse_zeta_system(double h, double window) {
  TranslationSemigroup s(h, window);
  return {s, Kernel::inverse_zeta(s), {2.0, FullLp{}}};
}

Eigen::VectorXd vec1(double x) { return Eigen::VectorXd::Constant(1, x); }

}  // namespace

TEST_CASE("modulation families") {
  CHECK(Modulation::power(1.0)(-2.0) == 2.0);
  CHECK(Modulation::power(0.5)(4.0) == Approx(2.0));
  CHECK(Modulation::affine(1.0, 2.0)(-3.0) == Approx(10.0));
  const auto tab = Modulation::tabulated({{0.0, 0.5}, {1.0, 1.5}}, 2.0);
  CHECK(tab(0.5) == Approx(1.0));
  CHECK(tab(-2.0) == Approx(3.5));
  CHECK(tab.at_zero() == 0.5);
  CHECK_THROWS_AS(Modulation::power(0.0), std::invalid_argument);
}

TEST_CASE("flow_modulated examples") {
  const auto cfg = scalar_modulated(Modulation::power(1.0));
  const auto u = Signal::scalar(0.01, Eigen::VectorXd::Constant(101, 2.0));
  CHECK(std::get<Eigen::VectorXd>(flow_modulated(cfg, 1.0, vec1(1.0), u))(0) ==
        Approx(std::exp(-2.0)).epsilon(1e-6));
  const auto zero = Signal::zero(0.01);
  CHECK(std::get<Eigen::VectorXd>(flow_modulated(cfg, 7.0, vec1(1.3), zero))(0) == 1.3);
  CHECK(std::get<Eigen::VectorXd>(flow_modulated(cfg, 0.0, vec1(1.3), u))(0) == 1.3);

  const auto affine = scalar_modulated(Modulation::affine(1.0, 1.0));
  CHECK(std::get<Eigen::VectorXd>(flow_modulated(affine, 2.0, vec1(1.0), zero))(0) ==
        Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(flow_modulated(cfg, 0.005, vec1(1.0), u), std::invalid_argument);
}

TEST_CASE("flow_linear examples") {
  const double h = 0.05;
  const auto cfg = inverse_zeta_system(h, 20.0);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(cfg.semigroup.window_size());
  w.head(20).setOnes();  // χ_[0, 1)
  const TranslationState x0(h, w);
  CHECK(state_norm(flow_linear(cfg, 2.0, x0, Signal::zero(h))) == 0.0);
  CHECK(state_distance(flow_linear(cfg, 0.0, x0, Signal::zero(h)), x0) == 0.0);

  const double r = 0.5, tau = 10.0;
  const auto u = Signal::scalar(h, Eigen::VectorXd::Constant(201, r));
  const auto phi = flow_linear(cfg, tau, TranslationState::zero(h, cfg.semigroup.window_size()), u);
  CHECK(state_norm(phi) == Approx(r * growth_norm(cfg.semigroup, cfg.kernel, tau)).epsilon(1e-5));
}

TEST_CASE("flow_semilinear scalar decay against step halving") {
  const double exact = 0.5 * std::exp(-2.0);
  auto at = [](double h) {
    return std::get<Eigen::VectorXd>(flow_semilinear(scalar_semilinear(h), 1.0, vec1(0.5), Signal::zero(h)))(0);
  };
  const double e1 = std::abs(at(0.01) - exact);
  const double e2 = std::abs(at(0.005) - exact);
  CHECK(e1 / e2 == Approx(2.0).epsilon(0.05));
  // Richardson extrapolation removes the first-order term.
  CHECK(std::abs(2.0 * at(0.005) - at(0.01) - exact) < 0.05 * e2);

  const auto zero = flow_semilinear(scalar_semilinear(0.01), 3.0, vec1(0.0), Signal::zero(0.01));
  CHECK(state_norm(zero) == 0.0);
}

TEST_CASE("semilinear small data follows the linearized semigroup") {
  const auto cfg = SemilinearSaturation::standard(32, 0.005);
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(32, 0.1);
  const double t = 5.0;
  const auto x = std::get<Eigen::VectorXd>(flow_semilinear(cfg, t, x0, Signal::zero(0.005)));
  Eigen::VectorXd expected(32);
  for (int n = 0; n < 32; ++n) expected(n) = std::exp(-t / (n + 1.0)) * 0.1;
  CHECK((cfg.b.cwiseProduct(x0)).norm() < 1.0);
  CHECK((x - expected).norm() < 0.01 * expected.norm());
}

TEST_CASE("semilinear configuration validation") {
  auto bad = SemilinearSaturation::standard(4, 0.01);
  bad.b(2) = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  auto step = SemilinearSaturation::standard(4, 0.01);
  step.h = 0.0;
  CHECK_THROWS_AS(step.validate(), std::invalid_argument);
}

TEST_CASE("simulate") {
  const auto cfg = scalar_modulated(Modulation::power(1.0));
  const auto zero_traj = simulate(cfg, State(vec1(0.0)), Signal::zero(0.1), 5.0);
  for (double n : zero_traj.norms) CHECK(n == 0.0);

  Eigen::VectorXd v(301);
  for (int k = 0; k <= 300; ++k) v(k) = std::sin(0.01 * k);
  const auto u = Signal::scalar(0.01, v);
  const auto traj = simulate(cfg, State(vec1(-2.0)), u, 3.0);
  CHECK(traj.norms.front() == 2.0);
  CHECK(traj.times.size() == 301);
  // v(t) = 1 - cos t on [0, π]
  for (int k : {50, 150, 300}) {
    const double t = 0.01 * k;
    CHECK(traj.norms[k] == Approx(2.0 * std::exp(-(1.0 - std::cos(t)))).epsilon(1e-5));
  }
  CHECK(traj.snapshots.size() == 19);

  const auto semi = SemilinearSaturation::standard(8, 0.01);
  const State x0 = Eigen::VectorXd::Constant(8, 0.7);
  const auto st = simulate(semi, x0, Signal::zero(0.02), 2.0);
  CHECK(st.norms.back() == Approx(state_norm(flow(semi, 2.0, x0, Signal::zero(0.02)))).epsilon(1e-14));
  CHECK(st.norms.front() == state_norm(x0));
}

TEST_CASE("linear simulate matches pointwise flow and contracts without input") {
  const double h = 0.05;
  const auto cfg = inverse_zeta_system(h, 20.0);
  Eigen::VectorXd w(cfg.semigroup.window_size());
  for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = std::cos(0.3 * h * k) / (1.0 + h * k);
  const TranslationState x0(h, w, {{TailTerm::Kind::Power, 0.2, 1.0, 1.0}});
  const auto free = simulate(cfg, x0, Signal::zero(h), 30.0);
  for (std::size_t k = 1; k < free.norms.size(); ++k) CHECK(free.norms[k] <= free.norms[k - 1] + 1e-12);

  const auto u = Signal::scalar(h, Eigen::VectorXd::LinSpaced(41, 1.0, 0.0), ExpTail{0.0, 1.0, 2.0});
  const auto forced = simulate(cfg, x0, u, 4.0);
  CHECK(forced.norms.back() == Approx(state_norm(flow(cfg, 4.0, x0, u))).epsilon(1e-10));
}

TEST_CASE("modulated contraction and weak decay under divergent inputs") {
  const auto cfg = scalar_modulated(Modulation::power(1.0), {2.0, AlphaDivergent{1.0}});
  const auto u = make_alpha_divergent(2.0, 1.0, 1.0, 0.1);
  const auto traj = simulate(cfg, State(vec1(1.0)), u, 200.0);
  for (double n : traj.norms) CHECK(n <= 1.0);
  // v(t) ≈ 4 t^{1/4}: e^{-v(200)} ≈ 1e-6.
  CHECK(traj.norms.back() < 1e-4);
}

TEST_CASE("axioms for the exact families") {
  const SystemConfig mod = ModulatedLinear{DiagonalSemigroup::strongly_stable(8), Modulation::power(1.0), {2.0, FullLp{}}};
  const auto rm = check_axioms(mod, make_axiom_plan(mod, 30, 7, 0.01, 4.0));
  CHECK(rm.samples == 30);
  CHECK(rm.identity == 0.0);
  CHECK(rm.cocycle <= 1e-9);
  CHECK(rm.causality == 0.0);

  const SystemConfig lin = inverse_zeta_system(0.05, 10.0);
  const auto rl = check_axioms(lin, make_axiom_plan(lin, 10, 8, 0.05, 6.0));
  CHECK(rl.identity <= 1e-12);
  CHECK(rl.cocycle <= 1e-9);
  CHECK(rl.causality <= 1e-12);
}

TEST_CASE("semilinear cocycle defect shrinks with the step") {
  const SystemConfig coarse = SemilinearSaturation::standard(8, 0.02);
  const SystemConfig fine = SemilinearSaturation::standard(8, 0.01);
  const auto plan = make_axiom_plan(coarse, 20, 9, 0.001, 4.0);
  const auto a = check_axioms(coarse, plan);
  const auto b = check_axioms(fine, plan);
  CHECK(a.cocycle <= 5 * 0.02);
  CHECK(b.cocycle <= 5 * 0.01);
  CHECK(a.cocycle / b.cocycle >= 1.8);
  CHECK(a.causality == 0.0);
}
