#include "wiss/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "wiss/quadrature.hpp"

namespace wiss {
namespace {

constexpr double kTol = 1e-9;

// Position of the last sample above `level`, or -1.
long last_index_above(const std::vector<double>& suffix_max, double level) {
  const auto it = std::partition_point(suffix_max.begin(), suffix_max.end(),
                                       [level](double s) { return s > level; });
  return static_cast<long>(it - suffix_max.begin()) - 1;
}

std::vector<double> suffix_maxima(const std::vector<double>& xs) {
  std::vector<double> out(xs.size());
  double m = -kInfinity;
  for (std::size_t i = xs.size(); i-- > 0;) {
    m = std::max(m, xs[i]);
    out[i] = m;
  }
  return out;
}

double refine(const Trajectory& traj, long j, double level) {
  const double a = traj.norms[j], b = traj.norms[j + 1];
  const double t0 = traj.times[j], t1 = traj.times[j + 1];
  return t0 + (t1 - t0) * (a - level) / (a - b);
}

void require_nonempty(const Trajectory& traj) {
  if (traj.norms.empty() || traj.norms.size() != traj.times.size())
    throw std::invalid_argument("envelope: empty or malformed trajectory");
}

}  // namespace

const char* to_string(EnvelopeCase c) {
  switch (c) {
    case EnvelopeCase::ZeroInitial: return "zero_initial";
    case EnvelopeCase::EventuallyBelow: return "eventually_below";
    case EnvelopeCase::NeverSettles: return "never_settles";
  }
  return "?";
}

std::optional<double> last_exceedance(const Trajectory& traj, double level) {
  require_nonempty(traj);
  long j = static_cast<long>(traj.norms.size()) - 1;
  while (j >= 0 && !(traj.norms[j] > level)) --j;
  if (j < 0) return 0.0;
  if (j + 1 == static_cast<long>(traj.norms.size())) return std::nullopt;
  return refine(traj, j, level);
}

Classification classify(const Trajectory& traj, double threshold, TailPolicy policy) {
  require_nonempty(traj);
  Classification c;
  if (traj.norms.front() == 0.0) return c;
  c.horizon_conditional = policy == TailPolicy::HorizonConditional;
  if (traj.norms.back() <= threshold) {
    c.kind = EnvelopeCase::EventuallyBelow;
    c.tau_inf = *last_exceedance(traj, threshold);
  } else {
    c.kind = EnvelopeCase::NeverSettles;
  }
  return c;
}

int compute_k(double sup_norm, double sigma_x, double threshold) {
  if (!(sigma_x > 0.0)) throw std::invalid_argument("compute_k: sigma_x must be positive");
  if (!(sup_norm > threshold))
    throw std::logic_error("compute_k: norm never exceeds the threshold; the trajectory settles");
  const double q = sigma_x / (sup_norm - threshold);
  // Ties sup = σx/k + threshold resolve to k.
  const double k = std::floor(q * (1.0 + 1e-12));
  if (k < 1.0)
    throw StabilityBoundViolation("compute_k: sup norm " + format_double(sup_norm) + " exceeds sigma_x + threshold = " +
                                  format_double(sigma_x + threshold));
  if (k > 1e9) throw std::logic_error("compute_k: k out of range");
  return static_cast<int>(k);
}

std::vector<double> crossing_times(const Trajectory& traj, double sigma_x, double threshold, int k,
                                   int max_levels) {
  require_nonempty(traj);
  if (k < 1) throw std::invalid_argument("crossing_times: k must be >= 1");
  const auto smax = suffix_maxima(traj.norms);
  const long last = static_cast<long>(traj.norms.size()) - 1;
  std::vector<double> taus{0.0};
  for (int n = 1; n <= max_levels; ++n) {
    const double level = sigma_x / (k + n) + threshold;
    const long j = last_index_above(smax, level);
    if (j < 0) throw std::logic_error("crossing_times: level " + std::to_string(n) + " is never exceeded");
    if (j == last) break;
    const double tau = refine(traj, j, level);
    if (!(tau > taus.back())) break;
    taus.push_back(tau);
  }
  if (taus.size() < 2)
    throw HorizonTooShort("crossing_times: the first level is still exceeded at the horizon " +
                          format_double(traj.times.back()));
  return taus;
}

double EnvelopeResult::beta0_at(double t) const {
  if (taus.empty()) return 0.0;
  const auto it = std::upper_bound(taus.begin(), taus.end(), t);
  if (it == taus.begin()) return levels.front();
  return levels[static_cast<std::size_t>(it - taus.begin()) - 1];
}

double EnvelopeResult::beta_at(double t) const { return beta ? (*beta)(t) : 0.0; }

EnvelopeResult build_envelope(const Trajectory& traj, double sigma_x, double gain_value,
                              const EnvelopeOptions& options) {
  const auto cls = classify(traj, gain_value, options.tail_policy);
  EnvelopeResult env;
  env.kind = cls.kind;
  env.horizon_conditional = cls.horizon_conditional;
  env.sigma_x = sigma_x;
  env.gain_value = gain_value;
  if (cls.kind == EnvelopeCase::ZeroInitial) {
    env.taus = {0.0};
    env.levels = {0.0};
    return env;
  }
  if (!(sigma_x > 0.0)) throw std::invalid_argument("build_envelope: sigma_x must be positive for x0 != 0");
  const double sup = traj.sup_norm();
  if (sup > sigma_x + gain_value + kTol)
    throw StabilityBoundViolation("build_envelope: sup norm " + format_double(sup) +
                                  " exceeds sigma_x + gain = " + format_double(sigma_x + gain_value));

  if (cls.kind == EnvelopeCase::EventuallyBelow) {
    std::vector<Breakpoint> pts{{0.0, 2.0 * sigma_x}};
    if (cls.tau_inf > 0.0) {
      env.taus = {0.0, cls.tau_inf};
      env.levels = {sigma_x, 0.0};
      pts.push_back({cls.tau_inf, sigma_x});
    } else {
      env.taus = {0.0};
      env.levels = {0.0};
    }
    env.beta = DecayFn(std::move(pts), options.tail_rate);
    return env;
  }

  env.k = compute_k(sup, sigma_x, gain_value);
  env.taus = crossing_times(traj, sigma_x, gain_value, env.k, options.max_levels);
  const int known = static_cast<int>(env.taus.size()) - 1;
  for (int n = 0; n <= known; ++n) env.levels.push_back(sigma_x / (env.k + n));

  // One known level is held back from the interpolation so the tail has a target.
  const int n_max = std::max(1, known - 1);
  env.interpolated_levels = n_max;
  std::vector<Breakpoint> pts{{0.0, 2.0 * sigma_x}};
  for (int n = 1; n <= n_max; ++n) pts.push_back({env.taus[n], sigma_x / (env.k + n - 1)});

  const double t_c = env.taus[n_max];
  const double c = sigma_x / (env.k + n_max - 1);
  double rate = options.tail_rate;
  for (int n = n_max; n <= known; ++n) {
    const double end = n + 1 <= known ? env.taus[n + 1] : traj.times.back();
    if (!(end > t_c)) continue;
    rate = std::min(rate, std::log(c * (env.k + n) / sigma_x) / (end - t_c));
  }
  env.beta = DecayFn(std::move(pts), rate);
  return env;
}

ItemIIIReport verify_item_iii(const Trajectory& traj, const EnvelopeResult& env, const CompFn& sigma) {
  require_nonempty(traj);
  ItemIIIReport rep;
  const double bound = sigma(traj.norms.front());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    const double b = env.beta_at(t);
    const double excess = traj.norms[i] - b - env.gain_value;
    const double beta_excess = b - bound;
    if (excess > rep.worst_excess) {
      rep.worst_excess = excess;
      rep.worst_time = t;
    }
    rep.worst_beta_excess = std::max(rep.worst_beta_excess, beta_excess);
    if (excess > kTol || beta_excess > kTol) {
      if (rep.violations == 0)
        rep.detail = "first violation at t=" + format_double(t) + ": norm=" + format_double(traj.norms[i]) +
                     " beta=" + format_double(b) + " gain=" + format_double(env.gain_value) +
                     " sigma(|x0|)=" + format_double(bound);
      ++rep.violations;
    }
  }
  rep.passed = rep.violations == 0;
  return rep;
}

EnvelopeInvariants check_envelope_invariants(const Trajectory& traj, const EnvelopeResult& env) {
  require_nonempty(traj);
  EnvelopeInvariants inv;
  if (env.beta) {
    const auto& pts = env.beta->breakpoints();
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (!(pts[i].y < pts[i - 1].y) || !(pts[i].x > pts[i - 1].x)) inv.beta_strictly_decreasing = false;
    if (!(env.beta->tail_rate() > 0.0)) inv.beta_strictly_decreasing = false;
  }
  double prev = kInfinity;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    const double b = env.beta_at(t), b0 = env.beta0_at(t);
    // Once the exponential tail underflows, consecutive grid values may both be 0.
    if (env.beta && !(b < prev) && !(b == 0.0 && prev == 0.0)) inv.beta_strictly_decreasing = false;
    prev = b;
    if (b0 > b * (1.0 + 1e-12) + 1e-300) inv.beta_dominates_step = false;
    if (b > 2.0 * env.sigma_x * (1.0 + 1e-12)) inv.beta_below_twice_sigma = false;
    if (traj.norms[i] > b0 + env.gain_value + kTol) inv.step_dominates_norm = false;
  }
  if (env.kind == EnvelopeCase::NeverSettles) {
    for (std::size_t n = 0; n < env.levels.size(); ++n)
      inv.level_error = std::max(inv.level_error,
                                 std::abs(env.levels[n] - env.sigma_x / (env.k + static_cast<double>(n))));
  }
  return inv;
}

void write_envelope_csv(std::ostream& os, const Trajectory& traj, const EnvelopeResult& env) {
  os << "t,norm,beta0,beta,gain\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    os << format_double(t) << ',' << format_double(traj.norms[i]) << ',' << format_double(env.beta0_at(t)) << ','
       << format_double(env.beta_at(t)) << ',' << format_double(env.gain_value) << '\n';
  }
}

}  // namespace wiss
