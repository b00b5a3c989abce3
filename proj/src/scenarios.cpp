#include "wiss/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "wiss/detail/overloaded.hpp"
#include "wiss/quadrature.hpp"
#include "wiss/random.hpp"

namespace wiss {
namespace {

using detail::overloaded;

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double x) { return format_double(x); }

double value_or(const std::optional<double>& o, double fallback) { return o ? *o : fallback; }

// Rounds t up to the grid of spacing dt.
double ceil_to_grid(double t, double dt) { return dt * std::ceil(t / dt - 1e-9); }
double floor_to_grid(double t, double dt) { return dt * std::floor(t / dt + 1e-9); }

Eigen::VectorXd vec1(double x) { return Eigen::VectorXd::Constant(1, x); }

Eigen::VectorXd random_vector(std::mt19937_64& g, Eigen::Index n, double amp) {
  Eigen::VectorXd v(n);
  for (auto& c : v) c = uniform(g, -amp, amp);
  return v;
}

// Random scalar window on [0, length], optionally followed by an exponential tail.
Signal random_input(std::mt19937_64& g, double dt, double length, double amp, bool exp_tail) {
  const long n = std::max(1L, grid_steps(ceil_to_grid(length, dt), dt));
  Eigen::VectorXd v = random_vector(g, n + 1, amp);
  if (!exp_tail) {
    v(n) = 0.0;
    return Signal::scalar(dt, v);
  }
  return Signal::scalar(dt, v, ExpTail{v(n), uniform(g, 0.3, 2.0), dt * static_cast<double>(n)});
}

// Random profile supported on [0, support] inside the translation window.
TranslationState random_bump(std::mt19937_64& g, const TranslationSemigroup& s, double support, double amp) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(s.window_size());
  const long n = std::min<long>(grid_steps(ceil_to_grid(support, s.step()), s.step()), w.size() - 1);
  for (long k = 0; k < n; ++k) w(k) = uniform(g, -amp, amp);
  return TranslationState(s.step(), std::move(w));
}

Assertion check(std::string name, bool ok, std::string detail) {
  return Assertion{std::move(name), ok, std::move(detail)};
}

DataTable trajectory_table(std::string name, std::string caption, const Trajectory& traj) {
  DataTable t{std::move(name), std::move(caption), {"t", "norm"}, {}};
  for (std::size_t i = 0; i < traj.times.size(); ++i) t.rows.push_back({traj.times[i], traj.norms[i]});
  return t;
}

// Builds the envelope of the primary trajectory; failures become a note.
void attach_envelope(ScenarioReport& rep, double sigma_x, double gain_value) {
  try {
    rep.envelope = build_envelope(rep.trajectory, sigma_x, gain_value);
    const auto& env = *rep.envelope;
    rep.envelope_note = std::string("case ") + to_string(env.kind) + ", sigma(|x0|) = " + fmt(sigma_x) +
                        ", gain = " + fmt(gain_value);
    if (env.kind == EnvelopeCase::NeverSettles)
      rep.envelope_note += ", k = " + std::to_string(env.k) + ", " + std::to_string(env.taus.size() - 1) +
                           " crossing times, tail rate " + fmt(env.beta->tail_rate());
    if (env.horizon_conditional) rep.envelope_note += " (case split conditional on the horizon)";
  } catch (const std::exception& e) {
    rep.envelope.reset();
    rep.envelope_note = std::string("no envelope: ") + e.what();
  }
}

double slope_through_origin(const std::vector<Breakpoint>& pts) {
  double xy = 0.0, xx = 0.0;
  for (const auto& p : pts) {
    xy += p.x * p.y;
    xx += p.x * p.x;
  }
  return xy / xx;
}

bool nonincreasing(const std::vector<double>& xs, double tol) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] > xs[i - 1] + tol) return false;
  return true;
}

// --- system builders -------------------------------------------------------

ModulatedLinear ex41_system(double p) {
  return {DiagonalSemigroup(Eigen::VectorXd::Constant(1, -1.0)), Modulation::power(1.0), {p, AlphaDivergent{1.0}}};
}

ModulatedLinear prop41_system(double p) {
  const Modulation alpha = std::isinf(p) ? Modulation::affine(1.0, 2.0) : Modulation::affine(1.0, 1.0);
  return {DiagonalSemigroup::strongly_stable(4), alpha, {p, FullLp{}}};
}

LinearDuhamel inverse_zeta_system(double dt, double window, InputSpaceSpec space) {
  TranslationSemigroup s(dt, window);
  return {s, Kernel::inverse_zeta(s), space};
}

LinearDuhamel exponential_system(double dt, double window, InputSpaceSpec space) {
  TranslationSemigroup s(dt, window);
  return {s, Kernel::exponential(s, 1.0), space};
}

SemilinearSaturation ex43_system(Eigen::Index n, double h) {
  auto cfg = SemilinearSaturation::standard(n, h);
  cfg.input_space = {2.0, FullLp{}};
  return cfg;
}

// Input u0 of the separation example: square integrable, yet ∫|u0| = ∞.
Signal ex41_input(double p, double dt) { return make_alpha_divergent(p, 1.0, 1.0, dt); }

// --- scenario bodies ---------------------------------------------------------

ScenarioReport ex41(const ScenarioParams& prm) {
  ScenarioReport rep;
  const double dt = value_or(prm.dt, 0.01);
  const double horizon = value_or(prm.horizon, 400.0);
  const double p = value_or(prm.p, 2.0);
  rep.settings = {"system = x' = |u(t)| A x, A = -1 on R", "dt = " + fmt(dt), "horizon = " + fmt(horizon),
                  "p = " + fmt(p), "seed = " + std::to_string(prm.seed)};
  const ModulatedLinear cfg = ex41_system(p);
  const Signal u0 = ex41_input(p, dt);
  const double norm_u0 = lp_norm(u0, p);

  // Uniform global stability with sigma = id on seeded mixed samples.
  std::vector<StabilitySample> samples;
  for (std::uint64_t i = 0; i < 16; ++i) {
    auto g = sample_rng(prm.seed, i);
    const double len = dt * static_cast<double>(uniform_int(g, 10, 300));
    Signal u = concat(random_input(g, dt, len, 1.5, false), make_alpha_divergent(p, 1.0, uniform(g, 0.2, 2.0), dt), len);
    samples.push_back({State(vec1(uniform(g, -3.0, 3.0))), std::move(u)});
  }
  auto ugs = check_stability_bound(cfg, Property::UGS, CompFn::identity(), CompFn::linear(1e-3), samples,
                                   std::min(horizon, 50.0), p);
  rep.assertions.push_back(check("UGS with sigma = id", ugs.status == VerdictStatus::Witnessed, ugs.evidence));
  rep.verdicts.push_back(std::move(ugs));

  // Weak asymptotic gain 0 along u0.
  const Eigen::VectorXd x0 = vec1(2.0);
  rep.trajectory = simulate(cfg, State(x0), u0, horizon);
  rep.trajectory_label = "x0 = 2, u = u0 (square integrable, not integrable)";
  PropertyVerdict wag;
  wag.property = Property::WAG0;
  wag.horizon = horizon;
  wag.budget = 1;
  DataTable times{"weak_gain_times", "weak gain times along u0 with gain 0", {"eps", "tau"}, {}};
  bool finite = true;
  for (double eps : {1.0, 0.1, 0.01}) {
    const auto tau = weak_ag_time(rep.trajectory, eps, 0.0);
    finite = finite && tau.has_value();
    wag.series.emplace_back(eps, tau ? *tau : kInfinity);
    times.rows.push_back({eps, tau ? *tau : kInfinity});
  }
  wag.status = finite ? VerdictStatus::Witnessed : VerdictStatus::Inconclusive;
  wag.evidence = "tau(eps) finite for eps in {1, 0.1, 0.01} within the horizon";
  rep.assertions.push_back(check("weak gain times finite for eps in {1, 0.1, 0.01}", finite, wag.evidence));
  rep.verdicts.push_back(std::move(wag));
  rep.tables.push_back(std::move(times));

  // Strong gain attack: the idle prefix freezes the state.
  const Gain id = CompFn::identity();
  AttackOptions opts;
  opts.p = p;
  auto attack = strong_ag_attack(cfg, vec1(1.0), u0, id, opts);
  const double radius = 1.0 + norm_u0 + opts.pad;
  double preservation = 0.0;
  DataTable att{"attack", "strong gain attack, |x0| = 2 + |u0|", {"tau", "margin", "norm", "bound"}, {}};
  for (const auto& [tau, margin] : attack.series) {
    const Signal u = concat(Signal::zero(dt), u0, tau);
    const double norm = state_norm(flow(cfg, tau, State(Eigen::VectorXd(vec1(radius))), u));
    preservation = std::max(preservation, std::abs(norm - radius));
    att.rows.push_back({tau, margin, norm, 1.0 + lp_norm(u, p)});
  }
  rep.assertions.push_back(check("attack falsifies the strong gain", attack.status == VerdictStatus::Falsified,
                                 attack.evidence));
  rep.assertions.push_back(check("norm preserved up to tau to 1e-12", preservation <= 1e-12,
                                 "max | |phi(tau)| - |x0| | = " + fmt(preservation)));
  const double replayed = replay(cfg, *attack.counterexample);
  rep.assertions.push_back(check("counterexample replays", replayed >= 0.99 * attack.counterexample->margin,
                                 "replayed margin " + fmt(replayed)));

  // Margin is |x0| - eps - gain(|u0|), linear in |x0|.
  DataTable lin{"attack_margin", "attack margin against |x0|", {"norm_x0", "margin", "expected"}, {}};
  double lin_err = 0.0;
  for (double pad : {1.0, 2.0, 4.0, 8.0}) {
    AttackOptions o = opts;
    o.pad = pad;
    o.candidate_times = {10.0};
    const auto v = strong_ag_attack(cfg, vec1(1.0), u0, id, o);
    const double r = 1.0 + norm_u0 + pad;
    lin.rows.push_back({r, v.counterexample->margin, r - 1.0 - norm_u0});
    lin_err = std::max(lin_err, std::abs(v.counterexample->margin - (r - 1.0 - norm_u0)));
  }
  rep.assertions.push_back(check("attack margin = |x0| - eps - |u0|", lin_err <= 1e-9, "max error " + fmt(lin_err)));
  rep.verdicts.push_back(std::move(attack));
  rep.tables.push_back(std::move(att));
  rep.tables.push_back(std::move(lin));

  attach_envelope(rep, 2.0, 0.0);
  rep.notes.push_back("The system is weakly but not strongly ISS: every input admits a finite weak gain time, "
                      "while no single time works for all inputs of the given size.");
  return rep;
}

ScenarioReport prop41(const ScenarioParams& prm) {
  ScenarioReport rep;
  const double dt = value_or(prm.dt, 0.01);
  const double eps = 0.1, r_bar = 2.0;
  std::vector<double> ps = {2.0, kInfinity};
  if (prm.p) ps = {*prm.p};
  rep.settings = {"system = x' = alpha(u(t)) A x, A = diag(-1/n), N = 4",
                  "alpha = 1 + |r| for p < inf, 1 + r^2 for p = inf", "dt = " + fmt(dt), "eps = " + fmt(eps),
                  "|x0| = " + fmt(r_bar), "inputs per p = 1000", "seed = " + std::to_string(prm.seed)};
  DataTable bounds{"time_bounds", "explicit strong gain times", {"p", "v_bar", "c", "r_bar", "delta", "tau_bar"}, {}};

  for (std::size_t pi = 0; pi < ps.size(); ++pi) {
    const double p = ps[pi];
    const ModulatedLinear cfg = prop41_system(p);
    auto g0 = sample_rng(prm.seed, 1000000 + pi);
    Eigen::VectorXd x0 = random_vector(g0, 4, 1.0);
    x0 *= r_bar / x0.norm();
    const StrongTime st = strong_ag_witness_modulated(cfg, eps, x0);
    bounds.rows.push_back({p, st.v_bar, st.c, st.r_bar, st.delta, st.tau_bar});

    const double t_low = floor_to_grid(st.tau_bar, dt);
    const double t_high = ceil_to_grid(st.tau_bar, dt);
    const long n = grid_steps(t_high, dt);
    int violations = 0, decay_failures = 0;
    double min_slack = kInfinity, worst_norm = 0.0;
    DataTable samples{std::isinf(p) ? "inputs_pinf" : "inputs_p" + fmt(p),
                      "sampled inputs with |u| <= r_bar", {"index", "norm_u", "dilated_time", "norm_at_tau"}, {}};
    std::vector<StabilitySample> ugs_samples;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      auto g = sample_rng(prm.seed, i + 2000 * (pi + 1));
      Eigen::VectorXd w = Eigen::VectorXd::Zero(n + 1);
      switch (i % 4) {
        case 0: w = random_vector(g, n + 1, 1.0); break;
        case 1: w(uniform_int(g, 1, n - 1)) = 1.0; break;
        case 2: w.setConstant(1.0); break;
        default: {
          const double om = uniform(g, 0.1, 10.0), ph = uniform(g, 0.0, 2.0 * kPi);
          for (long k = 0; k <= n; ++k) w(k) = std::sin(om * dt * static_cast<double>(k) + ph);
        }
      }
      Signal u = Signal::scalar(dt, w);
      // Spikes sit on the sphere; the rest are scaled into the ball.
      const double target = (i % 4 == 1 ? 1.0 : uniform(g, 0.05, 1.0)) * r_bar;
      w *= target / lp_norm(u, p);
      u = Signal::scalar(dt, w);
      const double v = dilated_time(cfg.alpha, u, t_low);
      const double norm = state_norm(flow(cfg, t_high, State(x0), u));
      min_slack = std::min(min_slack, v - st.v_bar);
      worst_norm = std::max(worst_norm, norm);
      if (v < st.v_bar) ++violations;
      if (norm > eps + 1e-12) ++decay_failures;
      if (i % 50 == 0) samples.rows.push_back({static_cast<double>(i), lp_norm(u, p), v, norm});
      if (i < 16) ugs_samples.push_back({State(x0), u});
    }
    const std::string tag = std::isinf(p) ? "p = inf" : "p = " + fmt(p);
    rep.assertions.push_back(check(tag + ": dilated time reaches v_bar by tau_bar on all 1000 inputs", violations == 0,
                                   std::to_string(violations) + " violations, min slack " + fmt(min_slack) +
                                       ", tau_bar = " + fmt(st.tau_bar)));
    rep.assertions.push_back(check(tag + ": |phi(tau_bar)| <= eps on all 1000 inputs", decay_failures == 0,
                                   "worst norm " + fmt(worst_norm)));
    PropertyVerdict sag;
    sag.property = Property::SAG;
    sag.status = violations == 0 && decay_failures == 0 ? VerdictStatus::Witnessed : VerdictStatus::Falsified;
    sag.horizon = t_high;
    sag.budget = 1000;
    sag.series.emplace_back(eps, st.tau_bar);
    sag.evidence = tag + ": explicit time " + fmt(st.tau_bar) + " valid for sampled inputs with |u| <= |x0|";
    rep.verdicts.push_back(std::move(sag));
    auto ugs = check_stability_bound(cfg, Property::UGS, CompFn::identity(), CompFn::linear(1e-3), ugs_samples,
                                     t_high, p);
    rep.assertions.push_back(check(tag + ": UGS with sigma = id", ugs.status == VerdictStatus::Witnessed, ugs.evidence));
    rep.verdicts.push_back(std::move(ugs));
    rep.tables.push_back(std::move(samples));

    if (pi == 0) {
      const double horizon = value_or(prm.horizon, ceil_to_grid(2.0 * st.tau_bar, dt));
      auto g = sample_rng(prm.seed, 3000000);
      rep.trajectory = simulate(cfg, State(x0), random_input(g, dt, 5.0, 1.0, true), horizon);
      rep.trajectory_label = tag + ", seeded input with exponential tail";
      rep.settings.push_back("horizon = " + fmt(horizon));
      attach_envelope(rep, r_bar, 0.0);
    }
  }
  rep.tables.push_back(std::move(bounds));
  rep.notes.push_back("On full L^p inputs with alpha(0) > 0 the explicit time depends only on (eps, x0).");
  return rep;
}

ScenarioReport prop42(const ScenarioParams& prm) {
  ScenarioReport rep;
  const double dt = value_or(prm.dt, 0.05);
  const double horizon = value_or(prm.horizon, 40.0);
  const double window = 40.0;
  rep.settings = {"system = left translation on L2(0, inf), kernel b(z) = 1/z on [1, inf)",
                  "inputs = L2, gain bound pi r (Hilbert inequality)", "dt = " + fmt(dt),
                  "window = " + fmt(window), "horizon = " + fmt(horizon), "seed = " + std::to_string(prm.seed)};
  const LinearDuhamel cfg = inverse_zeta_system(dt, window, {2.0, FullLp{}});
  const CompFn gamma = CompFn::linear(kPi);

  auto g0 = sample_rng(prm.seed, 0);
  const TranslationState x0 = random_bump(g0, cfg.semigroup, 5.0, 1.0);
  const Trajectory free = simulate(cfg, State(x0), Signal::zero(dt), horizon);
  std::vector<std::pair<double, double>> taus;
  for (double eps : {1.0, 0.1}) {
    const auto tau = weak_ag_time(free, eps, 0.0);
    if (!tau) throw std::runtime_error("prop42_linear: free trajectory does not settle within the horizon");
    taus.emplace_back(eps, *tau);
  }

  std::vector<StabilitySample> samples;
  double worst = -kInfinity;
  DataTable tab{"eventual_bound", "max over t >= tau(eps, x0, 0) of |phi| - eps - pi |u|",
                {"sample", "eps", "tau", "margin"}, {}};
  for (std::uint64_t i = 0; i < 16; ++i) {
    auto g = sample_rng(prm.seed, i + 1);
    Signal u = random_input(g, dt, uniform(g, 1.0, 10.0), uniform(g, 0.1, 1.5), false);
    const double norm_u = lp_norm(u, 2.0);
    const auto traj = simulate(cfg, State(x0), u, horizon);
    for (const auto& [eps, tau] : taus) {
      double m = -kInfinity;
      for (std::size_t k = 0; k < traj.times.size(); ++k)
        if (traj.times[k] >= tau) m = std::max(m, traj.norms[k] - eps - kPi * norm_u);
      worst = std::max(worst, m);
      tab.rows.push_back({static_cast<double>(i), eps, tau, m});
    }
    samples.push_back({State(TranslationState::zero(dt, cfg.semigroup.window_size())), std::move(u)});
  }
  auto ugs = check_stability_bound(cfg, Property::UGS, CompFn::identity(), gamma, samples, horizon, 2.0);
  rep.assertions.push_back(check("zero-state bound |phi(t, 0, u)| <= pi |u|_2", ugs.status == VerdictStatus::Witnessed,
                                 ugs.evidence));
  rep.verdicts.push_back(std::move(ugs));
  rep.assertions.push_back(check("eventual bound eps + pi |u|_2 after tau(eps, x0, 0)", worst <= 1e-9,
                                 "worst margin " + fmt(worst)));
  PropertyVerdict sag;
  sag.property = Property::SAG;
  sag.status = worst <= 1e-9 ? VerdictStatus::Witnessed : VerdictStatus::Falsified;
  sag.horizon = horizon;
  sag.budget = samples.size();
  sag.series = taus;
  sag.evidence = "times taken from the zero-input trajectory alone; worst margin " + fmt(worst);
  rep.verdicts.push_back(std::move(sag));
  rep.tables.push_back(std::move(tab));

  auto g = sample_rng(prm.seed, 100);
  const Signal u = random_input(g, dt, 8.0, 1.0, false);
  rep.trajectory = simulate(cfg, State(x0), u, horizon);
  rep.trajectory_label = "bump initial profile, seeded L2 input";
  attach_envelope(rep, state_norm(State(x0)), kPi * lp_norm(u, 2.0));
  rep.notes.push_back("The input-to-state map is bounded on L2 by the Hilbert inequality; the eventual time "
                      "needs only the zero-input trajectory.");
  return rep;
}

ScenarioReport ex43(const ScenarioParams& prm) {
  ScenarioReport rep;
  const double h = value_or(prm.dt, 0.05);
  const double t = 50.0, r = 1.0;
  const Eigen::Index n_decay = prm.truncation.value_or(64);
  rep.settings = {"system = x' = A x - B g(B x) + B u, A = diag(-1/(2n)), B = diag(1/sqrt(2n))",
                  "probe time = " + fmt(t), "radius = " + fmt(r), "step h = " + fmt(h),
                  "decay truncation N = " + std::to_string(n_decay), "seed = " + std::to_string(prm.seed)};

  DataTable probe{"probe", "sup over the sphere of |phi(t, x0, 0)| / r", {"N", "sup_over_r", "exp(-t/N)", "error"}, {}};
  double prev = 0.0, worst = 0.0;
  bool increasing = true;
  std::vector<std::pair<double, double>> series;
  for (Eigen::Index n : {64, 128, 256}) {
    const SystemConfig cfg = ex43_system(n, h);
    const double sup = uniform_ag_probe(cfg, r, t, 8, prm.seed, h) / r;
    const double expected = std::exp(-t / static_cast<double>(n));
    worst = std::max(worst, std::abs(sup - expected));
    increasing = increasing && sup > prev;
    prev = sup;
    probe.rows.push_back({static_cast<double>(n), sup, expected, std::abs(sup - expected)});
    series.emplace_back(static_cast<double>(n), sup);
  }
  rep.assertions.push_back(check("probe equals exp(-t/N) within 1e-3", worst <= 1e-3, "max error " + fmt(worst)));
  rep.assertions.push_back(check("probe strictly increasing in N", increasing, "N in {64, 128, 256}"));
  PropertyVerdict uag;
  uag.property = Property::UAG;
  uag.status = VerdictStatus::Inconclusive;
  uag.series = series;
  uag.horizon = t;
  uag.budget = 3;
  uag.evidence = "each truncation decays uniformly, but the decay at fixed t weakens toward 1 as N grows";
  rep.verdicts.push_back(std::move(uag));
  rep.tables.push_back(std::move(probe));

  // The slowest mode still decays once the horizon is long enough.
  const SystemConfig cfg = ex43_system(n_decay, h);
  const double horizon =
      value_or(prm.horizon, ceil_to_grid(1.1 * static_cast<double>(n_decay) * std::log(100.0), h));
  rep.settings.push_back("decay horizon = " + fmt(horizon));
  const Eigen::VectorXd x0 = r * Eigen::VectorXd::Unit(n_decay, n_decay - 1);
  rep.trajectory = simulate(cfg, State(x0), Signal::zero(h), horizon);
  rep.trajectory_label = "x0 = r e_N, zero input";
  const auto tau = weak_ag_time(rep.trajectory, 0.01 * r, 0.0);
  rep.assertions.push_back(check("slowest mode decays below 0.01 r", tau.has_value(),
                                 tau ? "from t = " + fmt(*tau) : "still above at the horizon"));
  PropertyVerdict wag;
  wag.property = Property::WAG;
  wag.status = tau ? VerdictStatus::Witnessed : VerdictStatus::Inconclusive;
  wag.horizon = horizon;
  wag.budget = 1;
  wag.evidence = tau ? "|phi| <= 0.01 r from t = " + fmt(*tau) : "not settled";
  rep.verdicts.push_back(std::move(wag));

  std::vector<StabilitySample> samples;
  const Eigen::Index n_small = 16;
  const SystemConfig small = ex43_system(n_small, h);
  for (std::uint64_t i = 0; i < 16; ++i) {
    auto g = sample_rng(prm.seed, i);
    Eigen::VectorXd x = random_vector(g, n_small, 1.0);
    x *= uniform(g, 0.0, 3.0) / x.norm();
    const long steps = grid_steps(ceil_to_grid(uniform(g, 1.0, 10.0), h), h);
    Eigen::MatrixXd w(n_small, steps + 1);
    for (long k = 0; k <= steps; ++k) w.col(k) = random_vector(g, n_small, 0.5);
    w.col(steps).setZero();
    samples.push_back({State(x), Signal(h, std::move(w))});
  }
  auto ugs = check_stability_bound(small, Property::UGS, CompFn::identity(), CompFn::identity(), samples, 20.0, 2.0);
  rep.assertions.push_back(check("UGS with sigma = gamma = id (N = 16)", ugs.status == VerdictStatus::Witnessed,
                                 ugs.evidence));
  rep.verdicts.push_back(std::move(ugs));

  attach_envelope(rep, r, 0.0);
  rep.notes.push_back("Each truncation is exponentially stable, so uniformity fails only in the limit of N; "
                      "the probe trend is the numerical evidence.");
  return rep;
}

ScenarioReport ex51(const ScenarioParams& prm) {
  ScenarioReport rep;
  const double dt = value_or(prm.dt, 0.05);
  const double window = 200.0;
  const double horizon = value_or(prm.horizon, 120.0);
  const double r = 1.0;
  rep.settings = {"system = left translation on L2(0, inf), kernel b(z) = 1/z on [1, inf)",
                  "inputs = bounded, eventually exponentially decaying, sup norm", "dt = " + fmt(dt),
                  "window = " + fmt(window), "horizon = " + fmt(horizon), "radius = " + fmt(r),
                  "seed = " + std::to_string(prm.seed)};
  const LinearDuhamel cfg = inverse_zeta_system(dt, window, {kInfinity, EventuallyExpDecaying{}});

  DataTable growth{"growth_norm", "|int_0^tau b(. + s) ds|", {"tau", "growth_norm"}, {}};
  bool increasing = true;
  double prev = 0.0;
  for (double tau : {10.0, 20.0, 40.0, 80.0}) {
    const double gn = growth_norm(cfg.semigroup, cfg.kernel, tau);
    increasing = increasing && gn > prev;
    prev = gn;
    growth.rows.push_back({tau, gn});
  }
  const double ratio = growth.rows.back()[1] / growth.rows.front()[1];
  rep.assertions.push_back(check("growth_norm strictly increasing over tau in {10, 20, 40, 80}", increasing, ""));
  rep.assertions.push_back(check("growth_norm(80) / growth_norm(10) > 2", ratio > 2.0, "ratio " + fmt(ratio)));
  rep.tables.push_back(std::move(growth));

  // Zero-input runs: the translation only removes mass.
  std::vector<StabilitySample> free_samples;
  bool monotone = true;
  for (std::uint64_t i = 0; i < 8; ++i) {
    auto g = sample_rng(prm.seed, i);
    const TranslationState x0 = random_bump(g, cfg.semigroup, uniform(g, 2.0, 30.0), 1.0);
    const auto traj = simulate(cfg, State(x0), Signal::zero(dt), 40.0);
    monotone = monotone && nonincreasing(traj.norms, 1e-12);
    if (i == 0) {
      rep.trajectory = traj;
      rep.trajectory_label = "seeded bump initial profile, zero input";
    }
    free_samples.push_back({State(x0), Signal::zero(dt)});
  }
  auto zugs = check_stability_bound(cfg, Property::ZeroInputUGS, CompFn::identity(), CompFn::linear(1e-3),
                                    free_samples, 40.0, kInfinity);
  rep.assertions.push_back(check("zero-input UGS with sigma = id", zugs.status == VerdictStatus::Witnessed,
                                 zugs.evidence));
  rep.assertions.push_back(check("zero-input norms non-increasing to 1e-12", monotone, "8 seeded profiles"));
  rep.verdicts.push_back(std::move(zugs));

  // Weak asymptotic gain 0 for a decaying input.
  {
    auto g = sample_rng(prm.seed, 50);
    const TranslationState x0 = random_bump(g, cfg.semigroup, 5.0, 1.0);
    Eigen::MatrixXd w = Eigen::MatrixXd::Constant(1, grid_steps(2.0, dt) + 1, 0.5);
    const Signal u = make_eventually_exp_decaying(dt, w, 0.5, 1.0);
    const auto traj = simulate(cfg, State(x0), u, horizon);
    PropertyVerdict wag;
    wag.property = Property::WAG0;
    wag.horizon = horizon;
    wag.budget = 1;
    bool finite = true;
    for (double eps : {1.0, 0.5, 0.2}) {
      const auto tau = weak_ag_time(traj, eps, 0.0);
      finite = finite && tau.has_value();
      wag.series.emplace_back(eps, tau ? *tau : kInfinity);
    }
    wag.status = finite ? VerdictStatus::Witnessed : VerdictStatus::Inconclusive;
    wag.evidence = "decaying input, gain 0: tau(eps) finite for eps in {1, 0.5, 0.2}; the decay is like 1/sqrt(t)";
    rep.assertions.push_back(check("weak gain 0 times finite", finite, wag.evidence));
    rep.verdicts.push_back(std::move(wag));
    rep.tables.push_back(trajectory_table("decaying_input", "x0 bump, u = 0.5 on [0, 2] then 0.5 e^{-(t-2)}", traj));
  }

  // Fit a local stability gain from unit-window constant inputs, then beat it.
  std::vector<Breakpoint> pts;
  const long unit = grid_steps(1.0, dt);
  for (double a : {0.25, 0.5, 1.0, 2.0}) {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(unit + 2, a);
    w(unit + 1) = 0.0;
    const auto traj = simulate(cfg, State(TranslationState::zero(dt, cfg.semigroup.window_size())),
                               Signal::scalar(dt, w), 20.0);
    pts.push_back({a, traj.sup_norm()});
  }
  const CompFn gamma = fit_k_upper(pts);
  double tau_bar = 0.0;
  for (double tau = 1.0; tau <= 400.0; tau += 1.0) {
    if (r * growth_norm(cfg.semigroup, cfg.kernel, tau) > 1.05 * gamma(r)) {
      tau_bar = tau;
      break;
    }
  }
  if (tau_bar == 0.0) throw std::runtime_error("ex51_zugs_not_uls: growth_norm never exceeds the fitted gain");
  const long nb = grid_steps(tau_bar, dt);
  const Signal u_r = Signal::scalar(dt, Eigen::VectorXd::Constant(nb + 1, r), ExpTail{r, 1.0, tau_bar});
  std::vector<StabilitySample> attack{{State(TranslationState::zero(dt, cfg.semigroup.window_size())), u_r}};
  auto uls = check_stability_bound(cfg, Property::ULS, CompFn::identity(), gamma, attack, tau_bar, kInfinity);
  const double reached = state_norm(flow(cfg, tau_bar, attack[0].x0, u_r));
  rep.assertions.push_back(check("constructed (0, u_r) violates the fitted local bound at r = 1",
                                 uls.status == VerdictStatus::Falsified,
                                 "gamma(1) = " + fmt(gamma(r)) + ", |phi(tau_bar)| = " + fmt(reached) +
                                     ", tau_bar = " + fmt(tau_bar)));
  uls.evidence += "; gamma fitted from unit-window constant inputs, tau_bar = " + fmt(tau_bar);
  rep.verdicts.push_back(std::move(uls));
  DataTable fit{"fitted_gain", "zero-state sup norms of unit-window constant inputs", {"amplitude", "sup_norm"}, {}};
  for (const auto& p : pts) fit.rows.push_back({p.x, p.y});
  rep.tables.push_back(std::move(fit));

  attach_envelope(rep, state_norm(free_samples[0].x0), 0.0);
  rep.notes.push_back("The kernel is square integrable but not integrable, so constant inputs of fixed size push "
                      "the state arbitrarily far; no local gain can hold.");
  rep.notes.push_back("The factor 1.05 in the choice of tau_bar and the ratio threshold 2 are chosen defaults.");
  return rep;
}

ScenarioReport prop51(const ScenarioParams& prm) {
  ScenarioReport rep;
  const double dt = value_or(prm.dt, 0.05);
  const double window = 20.0;
  const double horizon = value_or(prm.horizon, 20.0);
  rep.settings = {"system = left translation on L2(0, inf), kernel b(z) = e^{-z}", "inputs = L^inf, sup norm",
                  "dt = " + fmt(dt), "window = " + fmt(window), "horizon = " + fmt(horizon),
                  "seed = " + std::to_string(prm.seed)};
  const LinearDuhamel cfg = exponential_system(dt, window, {kInfinity, FullLp{}});
  const State origin = TranslationState::zero(dt, cfg.semigroup.window_size());

  std::vector<Breakpoint> state_pts, input_pts;
  std::vector<StabilitySample> free_samples;
  for (std::uint64_t i = 0; i < 8; ++i) {
    auto g = sample_rng(prm.seed, i);
    const State x0 = random_bump(g, cfg.semigroup, uniform(g, 1.0, 15.0), uniform(g, 0.2, 2.0));
    state_pts.push_back({state_norm(x0), simulate(cfg, x0, Signal::zero(dt), horizon).sup_norm()});
    free_samples.push_back({x0, Signal::zero(dt)});
  }
  for (double a : {0.25, 0.5, 1.0, 2.0}) {
    const Signal u = Signal::scalar(dt, Eigen::VectorXd::Constant(2, a), ConstantTail{a});
    input_pts.push_back({a, simulate(cfg, origin, u, horizon).sup_norm()});
  }
  const double m1 = slope_through_origin(state_pts);
  const double m2 = slope_through_origin(input_pts);
  const double m2_exact = 1.0 / std::sqrt(2.0);
  rep.assertions.push_back(check("M1 recovered within 5%", std::abs(m1 - 1.0) <= 0.05, "M1 = " + fmt(m1)));
  rep.assertions.push_back(check("M2 recovered within 5%", std::abs(m2 - m2_exact) <= 0.05 * m2_exact,
                                 "M2 = " + fmt(m2) + ", expected " + fmt(m2_exact)));
  DataTable reg{"regression", "sup norms against data size", {"kind", "size", "sup_norm"}, {}};
  for (const auto& p : state_pts) reg.rows.push_back({0.0, p.x, p.y});
  for (const auto& p : input_pts) reg.rows.push_back({1.0, p.x, p.y});
  rep.tables.push_back(std::move(reg));

  auto zuls = check_stability_bound(cfg, Property::ZeroInputUGS, CompFn::linear(m1 * 1.01), CompFn::linear(1e-3),
                                    free_samples, horizon, kInfinity);
  rep.assertions.push_back(check("zero-input stability with sigma = M1 r", zuls.status == VerdictStatus::Witnessed,
                                 zuls.evidence));
  rep.verdicts.push_back(std::move(zuls));

  std::vector<StabilitySample> mixed;
  for (std::uint64_t i = 0; i < 16; ++i) {
    auto g = sample_rng(prm.seed, 100 + i);
    State x0 = random_bump(g, cfg.semigroup, uniform(g, 1.0, 15.0), uniform(g, 0.2, 2.0));
    Signal u = (i % 2) ? Signal::scalar(dt, Eigen::VectorXd::Constant(2, uniform(g, -2.0, 2.0)),
                                        ConstantTail{0.0})
                       : random_input(g, dt, uniform(g, 1.0, 10.0), 2.0, true);
    if (i % 2) {
      const double a = u.sample_scalar(0);
      u = Signal::scalar(dt, Eigen::VectorXd::Constant(2, a), ConstantTail{a});
    }
    mixed.push_back({std::move(x0), std::move(u)});
  }
  auto ugs = check_stability_bound(cfg, Property::UGS, CompFn::linear(m1 * 1.01), CompFn::linear(m2 * 1.01), mixed,
                                   horizon, kInfinity);
  rep.assertions.push_back(check("UGS with sigma = 1.01 M1 r, gamma = 1.01 M2 r", ugs.status == VerdictStatus::Witnessed,
                                 ugs.evidence));
  rep.verdicts.push_back(std::move(ugs));

  // Weak gain 0 for a decaying input.
  {
    auto g = sample_rng(prm.seed, 500);
    const State x0 = random_bump(g, cfg.semigroup, 5.0, 1.0);
    const Signal u = random_input(g, dt, 3.0, 1.0, true);
    const auto traj = simulate(cfg, x0, u, std::max(horizon, 40.0));
    PropertyVerdict wag;
    wag.property = Property::WAG;
    wag.horizon = traj.times.back();
    wag.budget = 1;
    bool finite = true;
    for (double eps : {1.0, 0.1, 0.01}) {
      const auto tau = weak_ag_time(traj, eps, 0.0);
      finite = finite && tau.has_value();
      wag.series.emplace_back(eps, tau ? *tau : kInfinity);
    }
    wag.status = finite ? VerdictStatus::Witnessed : VerdictStatus::Inconclusive;
    wag.evidence = "decaying input, gain 0: tau(eps) finite for eps in {1, 0.1, 0.01}";
    rep.assertions.push_back(check("weak gain times finite", finite, wag.evidence));
    rep.verdicts.push_back(std::move(wag));
  }

  auto g = sample_rng(prm.seed, 900);
  const State x0 = random_bump(g, cfg.semigroup, 8.0, 1.0);
  const Signal u = Signal::scalar(dt, Eigen::VectorXd::Constant(2, 0.5), ConstantTail{0.5});
  rep.trajectory = simulate(cfg, x0, u, horizon);
  rep.trajectory_label = "bump initial profile, constant input 0.5";
  attach_envelope(rep, 1.01 * m1 * state_norm(x0), 1.01 * m2 * 0.5);
  rep.notes.push_back("Zero-input stability and the weak gain combine into a linear stability bound "
                      "M1 |x0| + M2 |u| with M1 = 1 and M2 = 1/sqrt(2) for this kernel.");
  return rep;
}

ScenarioReport thm3(const ScenarioParams& prm) {
  ScenarioReport rep;
  const double dt = value_or(prm.dt, 0.01);
  const double horizon = value_or(prm.horizon, 400.0);
  const double p = value_or(prm.p, 2.0);
  rep.settings = {"system = x' = |u(t)| A x, A = -1 on R", "sigma = id, beta bounded by 2 sigma",
                  "gain = 0 (even samples) or 0.05 r (odd samples)", "dt = " + fmt(dt),
                  "horizon = " + fmt(horizon), "p = " + fmt(p), "samples = 32",
                  "seed = " + std::to_string(prm.seed)};
  const SystemConfig cfg = ex41_system(p);
  const CompFn two_sigma = CompFn::linear(2.0);
  DataTable gal{"gallery", "envelope per sample (case: 1 eventually below, 2 never settles)",
                {"sample", "norm_x0", "norm_u", "case", "k", "crossings", "worst_excess", "violations"}, {}};
  std::size_t failures = 0, violations = 0, built = 0;
  bool decreasing = true, below = true;
  double level_error = 0.0;
  std::string first_failure;
  for (std::uint64_t i = 0; i < 32; ++i) {
    auto g = sample_rng(prm.seed, i);
    const double x = uniform(g, 0.5, 3.0) * (g() % 2 ? 1.0 : -1.0);
    const double len = dt * static_cast<double>(uniform_int(g, 50, 500));
    const Signal u = concat(random_input(g, dt, len, 1.0, false),
                            make_alpha_divergent(p, 1.0, uniform(g, 0.2, 1.5), dt), len);
    const Gain gain = i % 2 ? Gain(CompFn::linear(0.05)) : Gain::zero();
    const auto traj = simulate(cfg, State(vec1(x)), u, horizon);
    try {
      const auto env = build_envelope(traj, std::abs(x), gain(lp_norm(u, p)));
      ++built;
      const auto item = verify_item_iii(traj, env, two_sigma);
      const auto inv = check_envelope_invariants(traj, env);
      violations += item.violations;
      decreasing = decreasing && inv.beta_strictly_decreasing;
      below = below && inv.beta_below_twice_sigma && item.worst_beta_excess <= 1e-9;
      level_error = std::max(level_error, inv.level_error);
      if (!item.passed || !inv.all()) {
        ++failures;
        if (first_failure.empty()) first_failure = "sample " + std::to_string(i) + ": " + item.detail;
      }
      gal.rows.push_back({static_cast<double>(i), std::abs(x), lp_norm(u, p),
                          env.kind == EnvelopeCase::EventuallyBelow ? 1.0 : 2.0, static_cast<double>(env.k),
                          static_cast<double>(env.taus.size() - 1), item.worst_excess,
                          static_cast<double>(item.violations)});
      if (i == 0) {
        rep.trajectory = traj;
        rep.trajectory_label = "gallery sample 0";
        rep.envelope = env;
      }
    } catch (const std::exception& e) {
      ++failures;
      if (first_failure.empty()) first_failure = "sample " + std::to_string(i) + ": " + e.what();
    }
  }
  rep.assertions.push_back(check("envelope bound holds on all 32 trajectories", failures == 0 && built == 32,
                                 first_failure.empty() ? std::to_string(built) + " envelopes built" : first_failure));
  rep.assertions.push_back(check("zero grid violations", violations == 0, std::to_string(violations)));
  rep.assertions.push_back(check("beta strictly decreasing", decreasing, ""));
  rep.assertions.push_back(check("beta <= 2 sigma(|x0|)", below, ""));
  rep.assertions.push_back(check("step levels equal sigma(|x0|)/(k+n) to 1e-12", level_error <= 1e-12,
                                 "max error " + fmt(level_error)));
  rep.tables.push_back(std::move(gal));
  if (rep.envelope) {
    const auto& env = *rep.envelope;
    rep.envelope_note = std::string("case ") + to_string(env.kind) + ", k = " + std::to_string(env.k);
    DataTable steps{"crossings", "sample 0 crossing times and step levels", {"n", "tau_n", "level"}, {}};
    for (std::size_t n = 0; n < env.taus.size(); ++n)
      steps.rows.push_back({static_cast<double>(n), env.taus[n], env.levels[n]});
    rep.tables.push_back(std::move(steps));
  }
  rep.notes.push_back("The envelope is built per trajectory; its decay rate depends on (x0, u).");
  return rep;
}

using Runner = std::function<ScenarioReport(const ScenarioParams&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"ex41_wiss_not_siss", ex41},     {"prop41_equivalence", prop41}, {"prop42_linear", prop42},
      {"ex43_wiss_not_uiss", ex43},     {"ex51_zugs_not_uls", ex51},    {"prop51_equivalence", prop51},
      {"thm3_envelope_gallery", thm3},
  };
  return table;
}

const ScenarioInfo& info(const std::string& name) {
  for (const auto& i : list())
    if (i.name == name) return i;
  throw std::invalid_argument("unknown scenario: " + name);
}

}  // namespace

bool ScenarioReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

const std::vector<ScenarioInfo>& list() {
  static const std::vector<ScenarioInfo> catalog = {
      {"ex41_wiss_not_siss", "modulated scalar system: weakly but not strongly ISS (idle-prefix attack)"},
      {"prop41_equivalence", "modulated systems on full L^p inputs: explicit strong gain times"},
      {"prop42_linear", "linear systems on L^p inputs: eventual bound from zero-input times"},
      {"ex43_wiss_not_uiss", "semilinear diagonal system: weakly but not uniformly ISS"},
      {"ex51_zugs_not_uls", "translation with a non-integrable kernel: zero-input stable, not locally stable"},
      {"prop51_equivalence", "translation with an integrable kernel: linear stability bound recovered"},
      {"thm3_envelope_gallery", "per-trajectory decay envelopes on 32 seeded runs"},
  };
  return catalog;
}

ScenarioReport run(const std::string& name, const ScenarioParams& params) {
  const auto it = runners().find(name);
  if (it == runners().end()) throw std::invalid_argument("unknown scenario: " + name);
  ScenarioReport rep;
  try {
    rep = it->second(params);
  } catch (const std::exception& e) {
    throw std::runtime_error("scenario " + name + ": " + e.what());
  }
  rep.name = name;
  rep.summary = info(name).summary;
  return rep;
}

// --- presets and ad-hoc runs ---------------------------------------------------

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"ex41", "prop41", "prop42", "ex43", "ex51", "prop51"};
  return names;
}

Preset make_preset(const std::string& system, const ScenarioParams& prm) {
  auto g = sample_rng(prm.seed, 0);
  if (system == "ex41") {
    const double p = value_or(prm.p, 2.0), dt = value_or(prm.dt, 0.01);
    return {system, ex41_system(p), State(vec1(2.0)), ex41_input(p, dt), CompFn::identity(), Gain::zero(), p, dt,
            value_or(prm.horizon, 400.0)};
  }
  if (system == "prop41") {
    const double p = value_or(prm.p, 2.0), dt = value_or(prm.dt, 0.01);
    return {system, prop41_system(p), State(Eigen::VectorXd(Eigen::VectorXd::Ones(4))),
            random_input(g, dt, 5.0, 1.0, true), CompFn::identity(), Gain::zero(), p, dt,
            value_or(prm.horizon, 30.0)};
  }
  if (system == "prop42") {
    const double dt = value_or(prm.dt, 0.05);
    const auto cfg = inverse_zeta_system(dt, 40.0, {2.0, FullLp{}});
    State x0 = random_bump(g, cfg.semigroup, 5.0, 1.0);
    Signal u = random_input(g, dt, 8.0, 1.0, false);
    return {system, cfg, std::move(x0), std::move(u), CompFn::identity(), CompFn::linear(kPi), 2.0, dt,
            value_or(prm.horizon, 40.0)};
  }
  if (system == "ex43") {
    const double dt = value_or(prm.dt, 0.05);
    const Eigen::Index n = prm.truncation.value_or(64);
    const double horizon =
        value_or(prm.horizon, ceil_to_grid(1.1 * static_cast<double>(n) * std::log(100.0), dt));
    return {system, ex43_system(n, dt), State(Eigen::VectorXd(Eigen::VectorXd::Unit(n, n - 1))),
            Signal::zero(dt, n), CompFn::identity(), Gain::zero(), 2.0, dt, horizon};
  }
  if (system == "ex51") {
    const double dt = value_or(prm.dt, 0.05);
    const auto cfg = inverse_zeta_system(dt, 200.0, {kInfinity, EventuallyExpDecaying{}});
    State x0 = random_bump(g, cfg.semigroup, 5.0, 1.0);
    Signal u = make_eventually_exp_decaying(dt, Eigen::MatrixXd::Constant(1, grid_steps(2.0, dt) + 1, 0.5), 0.5, 1.0);
    return {system, cfg, std::move(x0), std::move(u), CompFn::identity(), Gain::zero(), kInfinity, dt,
            value_or(prm.horizon, 60.0)};
  }
  if (system == "prop51") {
    const double dt = value_or(prm.dt, 0.05);
    const auto cfg = exponential_system(dt, 20.0, {kInfinity, FullLp{}});
    State x0 = random_bump(g, cfg.semigroup, 8.0, 1.0);
    Signal u = Signal::scalar(dt, Eigen::VectorXd::Constant(2, 0.5), ConstantTail{0.5});
    return {system, cfg, std::move(x0), std::move(u), CompFn::linear(1.01), CompFn::linear(1.01 / std::sqrt(2.0)),
            kInfinity, dt, value_or(prm.horizon, 20.0)};
  }
  throw std::invalid_argument("unknown system: " + system);
}

namespace {

ScenarioReport preset_report(const Preset& ps, const std::string& what) {
  ScenarioReport rep;
  rep.name = what + " " + ps.name;
  rep.settings = {"system = " + ps.name, "dt = " + fmt(ps.dt), "horizon = " + fmt(ps.horizon), "p = " + fmt(ps.p)};
  return rep;
}

void simulate_into(ScenarioReport& rep, const Preset& ps) {
  rep.trajectory = simulate(ps.cfg, ps.x0, ps.u, ps.horizon);
  rep.trajectory_label = "preset initial state and input";
  attach_envelope(rep, ps.sigma(state_norm(ps.x0)), ps.gain(lp_norm(ps.u, ps.p)));
}

}  // namespace

ScenarioReport run_simulate(const std::string& system, const ScenarioParams& params) {
  const Preset ps = make_preset(system, params);
  auto rep = preset_report(ps, "simulate");
  rep.summary = "single trajectory of a preset system";
  simulate_into(rep, ps);
  const bool finite = std::all_of(rep.trajectory.norms.begin(), rep.trajectory.norms.end(),
                                  [](double n) { return std::isfinite(n); });
  rep.assertions.push_back(check("norms finite", finite, "sup norm " + fmt(rep.trajectory.sup_norm())));
  return rep;
}

ScenarioReport run_envelope(const std::string& system, const ScenarioParams& params) {
  const Preset ps = make_preset(system, params);
  auto rep = preset_report(ps, "envelope");
  rep.summary = "decay envelope of a preset trajectory";
  simulate_into(rep, ps);
  rep.assertions.push_back(check("envelope built", rep.envelope.has_value(), rep.envelope_note));
  if (rep.envelope) {
    std::vector<Breakpoint> doubled = ps.sigma.breakpoints();
    for (auto& b : doubled) b.y *= 2.0;
    const auto rep3 = verify_item_iii(rep.trajectory, *rep.envelope, CompFn(doubled, 2.0 * ps.sigma.tail_slope()));
    const auto inv = check_envelope_invariants(rep.trajectory, *rep.envelope);
    rep.assertions.push_back(check("|phi| <= beta + gain and beta <= 2 sigma", rep3.passed,
                                   rep3.passed ? "worst excess " + fmt(rep3.worst_excess) : rep3.detail));
    rep.assertions.push_back(check("envelope invariants", inv.all(), "level error " + fmt(inv.level_error)));
    DataTable steps{"crossings", "crossing times and step levels", {"n", "tau_n", "level"}, {}};
    for (std::size_t n = 0; n < rep.envelope->taus.size(); ++n)
      steps.rows.push_back({static_cast<double>(n), rep.envelope->taus[n], rep.envelope->levels[n]});
    rep.tables.push_back(std::move(steps));
  }
  return rep;
}

ScenarioReport run_falsify(const std::string& system, const ScenarioParams& params) {
  if (system == "ex41") {
    auto rep = run("ex41_wiss_not_siss", params);
    rep.name = "falsify ex41";
    return rep;
  }
  if (system == "ex51") {
    auto rep = run("ex51_zugs_not_uls", params);
    rep.name = "falsify ex51";
    return rep;
  }
  const Preset ps = make_preset(system, params);
  auto rep = preset_report(ps, "falsify");
  rep.summary = "randomized search for stability counterexamples";
  UgsPlan plan;
  plan.horizon = std::min(ps.horizon, 40.0);
  plan.p = ps.p;
  plan.dt = ps.dt;
  for (std::uint64_t i = 0; i < 8; ++i) {
    auto g = sample_rng(params.seed, 10 + i);
    const Signal u = [&] {
      if (const auto* s = std::get_if<SemilinearSaturation>(&ps.cfg)) {
        const long n = grid_steps(ceil_to_grid(uniform(g, 1.0, 5.0), ps.dt), ps.dt);
        Eigen::MatrixXd w(s->b.size(), n + 1);
        for (long k = 0; k <= n; ++k) w.col(k) = random_vector(g, s->b.size(), 0.5);
        w.col(n).setZero();
        return Signal(ps.dt, std::move(w));
      }
      return random_input(g, ps.dt, uniform(g, 1.0, 5.0), 1.0, false);
    }();
    const double scale = uniform(g, 0.2, 2.0);
    const State x0 = std::visit(overloaded{[&](const Eigen::VectorXd& v) -> State { return Eigen::VectorXd(v * scale); },
                                           [&](const TranslationState& f) -> State { return scale * f; }},
                                ps.x0);
    plan.initial_states.push_back(x0);
    plan.inputs.push_back(u);
    plan.held_out.push_back({x0, u});
  }
  auto v = estimate_ugs(ps.cfg, plan);
  rep.assertions.push_back(check("no UGS counterexample on held-out samples", v.status != VerdictStatus::Falsified,
                                 v.evidence));
  rep.verdicts.push_back(std::move(v));
  simulate_into(rep, ps);
  return rep;
}

ScenarioReport run_axioms(const std::string& system, const ScenarioParams& params) {
  const Preset ps = make_preset(system, params);
  auto rep = preset_report(ps, "axioms");
  rep.summary = "identity, cocycle, causality and continuity on 100 seeded tuples";
  const double max_time = std::min(ps.horizon, 4.0);
  DataTable tab{"axioms", "axiom defects (0: step h, 1: step h/2)", {"run", "identity", "cocycle", "causality",
                                                                      "continuity"}, {}};
  if (const auto* s = std::get_if<SemilinearSaturation>(&ps.cfg)) {
    const double plan_dt = s->h / 20.0;
    SemilinearSaturation half = *s;
    half.h = s->h / 2.0;
    const auto plan = make_axiom_plan(*s, 100, params.seed, plan_dt, max_time);
    const auto a = check_axioms(*s, plan);
    const auto b = check_axioms(half, plan);
    tab.rows.push_back({0.0, a.identity, a.cocycle, a.causality, a.continuity});
    tab.rows.push_back({1.0, b.identity, b.cocycle, b.causality, b.continuity});
    rep.assertions.push_back(check("identity exact", a.identity == 0.0, fmt(a.identity)));
    rep.assertions.push_back(check("cocycle defect <= 5 h", a.cocycle <= 5.0 * s->h, fmt(a.cocycle)));
    rep.assertions.push_back(check("causality defect <= 5 h", a.causality <= 5.0 * s->h, fmt(a.causality)));
    const double shrink = a.cocycle / b.cocycle;
    rep.assertions.push_back(check("cocycle defect shrinks >= 1.8x when h halves", shrink >= 1.8,
                                   "ratio " + fmt(shrink)));
  } else {
    const auto plan = make_axiom_plan(ps.cfg, 100, params.seed, ps.dt, max_time);
    const auto a = check_axioms(ps.cfg, plan);
    tab.rows.push_back({0.0, a.identity, a.cocycle, a.causality, a.continuity});
    rep.assertions.push_back(check("identity <= 1e-9", a.identity <= 1e-9, fmt(a.identity)));
    rep.assertions.push_back(check("cocycle <= 1e-9", a.cocycle <= 1e-9, fmt(a.cocycle)));
    rep.assertions.push_back(check("causality <= 1e-9", a.causality <= 1e-9, fmt(a.causality)));
  }
  rep.tables.push_back(std::move(tab));
  simulate_into(rep, ps);
  return rep;
}

// --- artifacts -----------------------------------------------------------------

void write_artifacts(const ScenarioReport& rep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& file) {
    std::ofstream os(dir / file);
    if (!os) throw std::runtime_error("cannot write " + (dir / file).string());
    return os;
  };

  {
    auto os = open("trajectory.csv");
    write_csv(os, rep.trajectory);
  }
  {
    auto os = open("envelope.csv");
    if (rep.envelope) {
      write_envelope_csv(os, rep.trajectory, *rep.envelope);
    } else {
      os << "t,norm,beta0,beta,gain\n";
      for (std::size_t i = 0; i < rep.trajectory.times.size(); ++i)
        os << fmt(rep.trajectory.times[i]) << ',' << fmt(rep.trajectory.norms[i]) << ",,,\n";
    }
  }
  {
    auto os = open("verdicts.csv");
    write_verdicts_csv(os, rep.verdicts);
  }
  for (const auto& t : rep.tables) {
    auto os = open(t.name + ".dat");
    os << "# " << t.caption << "\n#";
    for (const auto& c : t.columns) os << ' ' << c;
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t j = 0; j < row.size(); ++j) os << (j ? " " : "") << fmt(row[j]);
      os << '\n';
    }
  }

  auto os = open("report.txt");
  os << rep.name << '\n' << rep.summary << "\n\n";
  os << "Settings\n";
  for (const auto& s : rep.settings) os << "  " << s << '\n';
  os << "\nAssertions (" << (rep.passed() ? "all pass" : "FAILED") << ")\n";
  for (const auto& a : rep.assertions)
    os << "  " << (a.passed ? "PASS " : "FAIL ") << a.name << (a.detail.empty() ? "" : ": " + a.detail) << '\n';
  os << "\nTrajectory: " << rep.trajectory_label << '\n';
  os << "Envelope: " << (rep.envelope_note.empty() ? "none" : rep.envelope_note) << "\n\n";
  os << "Verdicts\n\n";
  write_report(os, rep.verdicts);
  if (!rep.notes.empty()) {
    os << "Notes\n";
    for (const auto& n : rep.notes) os << "  " << n << '\n';
    os << '\n';
  }
  os << "Files\n";
  os << "  trajectory.csv  t,norm: recorded times and state norms\n";
  os << "  envelope.csv    t,norm,beta0,beta,gain: step envelope, decay envelope and gain value; "
        "beta columns are empty when no envelope exists\n";
  os << "  verdicts.csv    property,status,horizon,budget,t,bound,margin: one row per verdict, the last three "
        "set for counterexamples\n";
  for (const auto& t : rep.tables) {
    os << "  " << t.name << ".dat  ";
    for (std::size_t j = 0; j < t.columns.size(); ++j) os << (j ? " " : "") << t.columns[j];
    os << ": " << t.caption << '\n';
  }
}

}  // namespace wiss
