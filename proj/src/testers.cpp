#include "wiss/testers.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "wiss/detail/overloaded.hpp"
#include "wiss/quadrature.hpp"
#include "wiss/random.hpp"

namespace wiss {
namespace {

using detail::overloaded;

constexpr double kTol = 1e-9;

Eigen::Index vector_dimension(const SystemConfig& cfg, const char* what) {
  return std::visit(overloaded{[](const ModulatedLinear& c) { return c.semigroup.dimension(); },
                               [](const SemilinearSaturation& c) { return c.b.size(); },
                               [&](const LinearDuhamel&) -> Eigen::Index {
                                 throw std::invalid_argument(std::string(what) + ": needs a vector-state system");
                               }},
                    cfg);
}

std::size_t argmax(const std::vector<double>& xs) {
  return static_cast<std::size_t>(std::max_element(xs.begin(), xs.end()) - xs.begin());
}

}  // namespace

const char* to_string(Property p) {
  switch (p) {
    case Property::UGS: return "UGS";
    case Property::ULS: return "ULS";
    case Property::ZeroInputUGS: return "zero-input-UGS";
    case Property::WAG: return "wAG";
    case Property::WAG0: return "wAG0";
    case Property::SAG: return "sAG";
    case Property::UAG: return "uAG";
    case Property::WLIM: return "wLIM";
  }
  return "?";
}

const char* to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Witnessed: return "witnessed";
    case VerdictStatus::Falsified: return "falsified";
    case VerdictStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

double replay(const SystemConfig& cfg, const Counterexample& cx) {
  return state_norm(flow(cfg, cx.t, cx.x0, cx.u)) - cx.bound;
}

State zero_state(const SystemConfig& cfg) {
  return std::visit(
      overloaded{[](const ModulatedLinear& c) -> State { return Eigen::VectorXd::Zero(c.semigroup.dimension()); },
                 [](const SemilinearSaturation& c) -> State { return Eigen::VectorXd::Zero(c.b.size()); },
                 [](const LinearDuhamel& c) -> State {
                   return TranslationState::zero(c.semigroup.step(), c.semigroup.window_size());
                 }},
      cfg);
}

PropertyVerdict check_stability_bound(const SystemConfig& cfg, Property tag, const CompFn& sigma,
                                      const CompFn& gamma, const std::vector<StabilitySample>& samples,
                                      double horizon, double p) {
  PropertyVerdict v;
  v.property = tag;
  v.horizon = horizon;
  v.budget = samples.size();
  v.fitted = {{"sigma", sigma}, {"gamma", gamma}};
  if (samples.empty()) {
    v.evidence = "no samples";
    return v;
  }
  double worst = -kInfinity;
  for (const auto& smp : samples) {
    const auto traj = simulate(cfg, smp.x0, smp.u, horizon);
    const double bound = sigma(state_norm(smp.x0)) + gamma(lp_norm(smp.u, p));
    const std::size_t i = argmax(traj.norms);
    const double margin = traj.norms[i] - bound;
    if (margin > worst) {
      worst = margin;
      if (margin > kTol) v.counterexample = Counterexample{smp.x0, smp.u, traj.times[i], bound, margin};
    }
  }
  v.status = v.counterexample ? VerdictStatus::Falsified : VerdictStatus::Witnessed;
  v.evidence = "max of sup_t |phi| - sigma(|x0|) - gamma(|u|) over samples: " + format_double(worst);
  return v;
}

PropertyVerdict estimate_ugs(const SystemConfig& cfg, const UgsPlan& plan) {
  std::vector<Breakpoint> state_pts, input_pts;
  const Signal none = Signal::zero(plan.dt);
  for (const auto& x0 : plan.initial_states)
    state_pts.push_back({state_norm(x0), simulate(cfg, x0, none, plan.horizon).sup_norm()});
  const State origin = zero_state(cfg);
  for (const auto& u : plan.inputs)
    input_pts.push_back({lp_norm(u, plan.p), simulate(cfg, origin, u, plan.horizon).sup_norm()});
  const CompFn sigma = fit_k_upper(state_pts);
  const CompFn gamma = fit_k_upper(input_pts);
  auto v = check_stability_bound(cfg, Property::UGS, sigma, gamma, plan.held_out, plan.horizon, plan.p);
  v.budget = plan.initial_states.size() + plan.inputs.size() + plan.held_out.size();
  if (plan.held_out.empty()) {
    v.status = VerdictStatus::Inconclusive;
    v.evidence = "fitted on " + std::to_string(v.budget) + " runs; no held-out samples";
  }
  return v;
}

std::optional<double> weak_ag_time(const Trajectory& traj, double eps, double gain_value) {
  const double bound = eps + gain_value;
  long j = static_cast<long>(traj.norms.size()) - 1;
  while (j >= 0 && !(traj.norms[j] > bound)) --j;
  if (j < 0) return traj.times.front();
  if (j + 1 == static_cast<long>(traj.norms.size())) return std::nullopt;
  return traj.times[j + 1];
}

std::optional<double> weak_ag_time(const SystemConfig& cfg, double eps, const State& x0, const Signal& u,
                                   const Gain& gain, double horizon, double p) {
  return weak_ag_time(simulate(cfg, x0, u, horizon), eps, gain(lp_norm(u, p)));
}

std::optional<double> weak_limit_time(const Trajectory& traj, double eps, double gain_value) {
  const double bound = eps + gain_value;
  for (std::size_t i = 0; i < traj.norms.size(); ++i)
    if (traj.norms[i] <= bound) return traj.times[i];
  return std::nullopt;
}

std::optional<double> weak_limit_time(const SystemConfig& cfg, double eps, const State& x0, const Signal& u,
                                      const Gain& gain, double horizon, double p) {
  return weak_limit_time(simulate(cfg, x0, u, horizon), eps, gain(lp_norm(u, p)));
}

PropertyVerdict strong_ag_attack(const ModulatedLinear& cfg, const Eigen::VectorXd& direction,
                                 const Signal& u0, const Gain& gain, const AttackOptions& options) {
  if (cfg.alpha.at_zero() != 0.0)
    throw std::invalid_argument("strong_ag_attack: needs alpha(0) = 0; zero inputs must freeze the state");
  if (direction.size() != cfg.semigroup.dimension() || direction.norm() == 0.0)
    throw std::invalid_argument("strong_ag_attack: direction must be a nonzero state");
  PropertyVerdict v;
  v.property = Property::SAG;
  v.budget = options.candidate_times.size();
  const double radius = options.eps + gain(lp_norm(u0, options.p)) + options.pad;
  const Eigen::VectorXd x0 = direction.normalized() * radius;
  const Signal idle = Signal::zero(u0.dt(), u0.dim());
  bool all = !options.candidate_times.empty();
  double worst_margin = kInfinity;
  for (double tau : options.candidate_times) {
    const Signal u = concat(idle, u0, tau);
    const double bound = options.eps + gain(lp_norm(u, options.p));
    const double norm = state_norm(flow_modulated(cfg, tau, x0, u));
    const double margin = norm - bound;
    v.series.emplace_back(tau, margin);
    v.horizon = std::max(v.horizon, tau);
    if (!(margin > 0.0)) all = false;
    if (margin < worst_margin) {
      worst_margin = margin;
      v.counterexample = Counterexample{State(x0), u, tau, bound, margin};
    }
  }
  v.status = all ? VerdictStatus::Falsified : VerdictStatus::Inconclusive;
  v.evidence = "|x0| = " + format_double(radius) + "; input idles on [0, tau] then replays u0; smallest margin " +
               format_double(worst_margin);
  return v;
}

double modulated_time_bound(double v_bar, double c, double r_bar, double delta, double p) {
  if (!(c > 0.0)) throw std::invalid_argument("modulated_time_bound: c must be positive");
  if (v_bar < 0.0 || r_bar < 0.0) throw std::invalid_argument("modulated_time_bound: negative data");
  if (std::isinf(p)) return v_bar / c;
  if (!(delta > 0.0)) throw std::invalid_argument("modulated_time_bound: delta must be positive");
  return v_bar / c + std::pow(r_bar, p) / std::pow(delta, p);
}

double dilation_needed(const DiagonalSemigroup& s, const Eigen::VectorXd& x0, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("dilation_needed: eps must be positive");
  auto ok = [&](double v) { return apply_diagonal(s, v, x0).norm() <= eps; };
  if (ok(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (!ok(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) throw std::runtime_error("dilation_needed: orbit does not reach the eps-ball");
  }
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

StrongTime strong_ag_witness_modulated(const ModulatedLinear& cfg, double eps, const Eigen::VectorXd& x0,
                                       double delta) {
  if (!std::holds_alternative<FullLp>(cfg.input_space.constraint))
    throw std::invalid_argument("strong_ag_witness_modulated: needs full L^p inputs");
  const double p = cfg.input_space.p;
  StrongTime st;
  st.v_bar = dilation_needed(cfg.semigroup, x0, eps);
  st.r_bar = x0.norm();
  st.delta = std::isinf(p) ? st.r_bar : delta;
  if (!std::isinf(p) && cfg.alpha.at_zero() == 0.0)
    throw std::invalid_argument("strong_ag_witness_modulated: alpha(0) = 0 rules out weak gains on L^p");
  constexpr int kGrid = 10000;
  double c = kInfinity;
  for (int i = 0; i <= kGrid; ++i) c = std::min(c, cfg.alpha(-st.delta + 2.0 * st.delta * i / kGrid));
  if (!(c > 0.0)) throw std::invalid_argument("strong_ag_witness_modulated: alpha vanishes on the search interval");
  st.c = c;
  st.tau_bar = modulated_time_bound(st.v_bar, c, st.r_bar, st.delta, p);
  return st;
}

double uniform_ag_probe(const SystemConfig& cfg, double r, double t, std::size_t random_count,
                        std::uint64_t seed, double dt) {
  const Eigen::Index n = vector_dimension(cfg, "uniform_ag_probe");
  const Signal none = Signal::zero(dt);
  double sup = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const State x0 = Eigen::VectorXd(r * Eigen::VectorXd::Unit(n, i));
    sup = std::max(sup, state_norm(flow(cfg, t, x0, none)));
  }
  for (std::size_t j = 0; j < random_count; ++j) {
    auto g = sample_rng(seed, j);
    std::normal_distribution<double> normal;
    Eigen::VectorXd x(n);
    for (auto& c : x) c = normal(g);
    const State x0 = Eigen::VectorXd(x.normalized() * r);
    sup = std::max(sup, state_norm(flow(cfg, t, x0, none)));
  }
  return sup;
}

double vanishing_shift_time(const Signal& u, double p, const Gain& gain, double eps) {
  auto small = [&](long n) { return gain(lp_norm(shift(u, u.dt() * static_cast<double>(n)), p)) <= eps; };
  if (small(0)) return 0.0;
  long lo = 0, hi = 1;
  while (!small(hi)) {
    lo = hi;
    hi *= 2;
    if (static_cast<double>(hi) * u.dt() > 1e7)
      throw std::runtime_error("vanishing_shift_time: shifted input norms do not fall below eps");
  }
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    (small(mid) ? hi : lo) = mid;
  }
  return u.dt() * static_cast<double>(hi);
}

Wag0Report wag_implies_wag0_check(const SystemConfig& cfg, const std::vector<Wag0Sample>& samples,
                                  const std::vector<double>& eps_grid, const Gain& gain, double horizon) {
  const auto& space = input_space(cfg);
  space.validate();
  const bool lp = std::holds_alternative<FullLp>(space.constraint) && !std::isinf(space.p);
  const bool l0 = std::holds_alternative<LInfty0>(space.constraint);
  if (!lp && !l0) throw std::invalid_argument("wag_implies_wag0_check: needs L^p (p < inf) or L^inf_0 inputs");

  Wag0Report rep;
  for (const auto& smp : samples) {
    const auto full = simulate(cfg, smp.x0, smp.u, horizon);
    for (double eps : eps_grid) {
      Wag0Outcome out;
      out.eps = eps;
      out.t0 = vanishing_shift_time(smp.u, space.p, gain, eps);
      if (out.t0 < horizon) {
        const State x1 = flow(cfg, out.t0, smp.x0, smp.u);
        const Signal u1 = shift(smp.u, out.t0);
        const auto restarted = simulate(cfg, x1, u1, horizon - out.t0);
        out.tau = weak_ag_time(restarted, eps, gain(lp_norm(u1, space.p)));
      }
      if (out.tau) {
        const double start = out.t0 + *out.tau;
        for (std::size_t i = 0; i < full.times.size(); ++i)
          if (full.times[i] >= start - 1e-12) out.worst = std::max(out.worst, full.norms[i]);
        out.passed = out.worst <= 2.0 * eps + kTol;
        rep.min_margin = std::min(rep.min_margin, 2.0 * eps - out.worst);
      }
      rep.passed = rep.passed && out.passed;
      rep.outcomes.push_back(out);
    }
  }
  return rep;
}

void write_report(std::ostream& os, const std::vector<PropertyVerdict>& verdicts) {
  for (const auto& v : verdicts) {
    os << "[" << to_string(v.property) << "]\n";
    os << "status: " << to_string(v.status) << '\n';
    os << "horizon: " << format_double(v.horizon) << '\n';
    os << "budget: " << v.budget << '\n';
    os << "evidence: " << v.evidence << '\n';
    for (const auto& [name, f] : v.fitted) {
      os << "fitted " << name << ": " << f.breakpoints().size() << " breakpoints, tail slope "
         << format_double(f.tail_slope()) << ", value at 1 = " << format_double(f(1.0)) << '\n';
    }
    for (const auto& [a, b] : v.series) os << "series: " << format_double(a) << ' ' << format_double(b) << '\n';
    if (v.counterexample) {
      const auto& cx = *v.counterexample;
      os << "counterexample: |x0|=" << format_double(state_norm(cx.x0)) << " t=" << format_double(cx.t)
         << " bound=" << format_double(cx.bound) << " margin=" << format_double(cx.margin) << '\n';
    }
    os << '\n';
  }
}

void write_verdicts_csv(std::ostream& os, const std::vector<PropertyVerdict>& verdicts) {
  os << "property,status,horizon,budget,t,bound,margin\n";
  for (const auto& v : verdicts) {
    os << to_string(v.property) << ',' << to_string(v.status) << ',' << format_double(v.horizon) << ','
       << v.budget << ',';
    if (v.counterexample) {
      const auto& cx = *v.counterexample;
      os << format_double(cx.t) << ',' << format_double(cx.bound) << ',' << format_double(cx.margin) << '\n';
    } else {
      os << ",,\n";
    }
  }
}

}  // namespace wiss
