#include "wiss/flows.hpp"

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

long aligned_steps(double t, double dt, const char* what) {
  if (t < 0.0) throw std::domain_error(std::string(what) + ": negative time");
  const long n = grid_steps(t, dt);
  if (n < 0) throw std::invalid_argument(std::string(what) + ": time is not on the input grid");
  return n;
}

const Eigen::VectorXd& vector_state(const State& x, const char* what) {
  const auto* v = std::get_if<Eigen::VectorXd>(&x);
  if (!v) throw std::invalid_argument(std::string(what) + ": expected a vector state");
  return *v;
}

const TranslationState& translation_state(const State& x, const char* what) {
  const auto* f = std::get_if<TranslationState>(&x);
  if (!f) throw std::invalid_argument(std::string(what) + ": expected a translation state");
  return *f;
}

// B u(t) for the semilinear system; zero inputs of any dimension are accepted.
Eigen::VectorXd control_term(const SemilinearSaturation& cfg, const Signal& u, double t) {
  if (u.is_zero()) return Eigen::VectorXd::Zero(cfg.b.size());
  if (u.dim() != cfg.b.size())
    throw std::invalid_argument("semilinear flow: input dimension must equal the state dimension");
  return cfg.b.cwiseProduct(u.at(t));
}

Eigen::VectorXd euler_step(const SemilinearSaturation& cfg, const Eigen::VectorXd& x, double t,
                           double step, const Signal& u) {
  const Eigen::VectorXd drift = -cfg.b.cwiseProduct(radial_retraction(cfg.b.cwiseProduct(x)));
  return apply_diagonal(cfg.a, step, x + step * (drift + control_term(cfg, u, t)));
}

// Marches from the origin in full steps of h; a shorter last step reaches off-lattice times.
class SemilinearMarch {
 public:
  SemilinearMarch(const SemilinearSaturation& cfg, Eigen::VectorXd x0, const Signal& u)
      : cfg_(cfg), u_(u), x_(std::move(x0)) {}

  // State at time t ≥ current full-step time, without disturbing the march.
  Eigen::VectorXd at(double t) {
    while (time_of(j_ + 1) <= t * (1.0 + 1e-12)) {
      x_ = euler_step(cfg_, x_, time_of(j_), cfg_.h, u_);
      ++j_;
    }
    const double rest = t - time_of(j_);
    if (rest <= 1e-12 * std::max(1.0, t)) return x_;
    return euler_step(cfg_, x_, time_of(j_), rest, u_);
  }

 private:
  double time_of(long j) const { return cfg_.h * static_cast<double>(j); }

  const SemilinearSaturation& cfg_;
  const Signal& u_;
  Eigen::VectorXd x_;
  long j_ = 0;
};

Eigen::VectorXd random_vector(std::mt19937_64& g, Eigen::Index n, double amp) {
  Eigen::VectorXd v(n);
  for (auto& x : v) x = uniform(g, -amp, amp);
  return v;
}

Signal random_scalar_input(std::mt19937_64& g, double dt, double length, double amp) {
  const long n = std::max(1L, grid_steps(length, dt));
  Eigen::VectorXd v = random_vector(g, n + 1, amp);
  return Signal::scalar(dt, v, ExpTail{v(n), uniform(g, 0.2, 2.0), dt * static_cast<double>(n)});
}

// Copies u on [0, tau] and continues with fresh random samples.
Signal diverging_copy(std::mt19937_64& g, const Signal& u, double tau, double amp) {
  const long n_tau = grid_steps(tau, u.dt());
  const long extra = uniform_int(g, 1, 40);
  Eigen::MatrixXd w(u.dim(), n_tau + 1 + extra);
  for (long k = 0; k <= n_tau; ++k) w.col(k) = u.sample(k);
  for (long k = n_tau + 1; k < w.cols(); ++k) w.col(k) = random_vector(g, u.dim(), amp);
  return Signal(u.dt(), std::move(w), ZeroTail{}, u.direction());
}

// Smooth vector input a_n sin(ω_n t + ψ_n) on [0, length].
Signal random_smooth_input(std::mt19937_64& g, Eigen::Index dim, double dt, double length, double amp) {
  const long n = grid_steps(length, dt);
  Eigen::VectorXd a = random_vector(g, dim, amp), omega(dim), psi(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    omega(i) = uniform(g, 0.1, 2.0);
    psi(i) = uniform(g, 0.0, 6.283185307179586);
  }
  Eigen::MatrixXd w(dim, n + 1);
  for (long k = 0; k <= n; ++k) {
    const double t = dt * static_cast<double>(k);
    w.col(k) = (a.array() * (omega.array() * t + psi.array()).sin()).matrix();
  }
  return Signal(dt, std::move(w));
}

}  // namespace

Modulation Modulation::power(double q) {
  if (!(q > 0.0)) throw std::invalid_argument("modulation exponent must be positive");
  Modulation m;
  m.q_ = q;
  return m;
}

Modulation Modulation::affine(double offset, double q) {
  if (!(offset >= 0.0)) throw std::invalid_argument("modulation offset must be nonnegative");
  Modulation m = power(q);
  m.offset_ = offset;
  return m;
}

Modulation Modulation::tabulated(std::vector<Breakpoint> points, double tail_slope) {
  if (points.empty() || points.front().x != 0.0)
    throw std::invalid_argument("tabulated modulation must start at r = 0");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].y >= 0.0)) throw std::invalid_argument("modulation values must be nonnegative");
    if (i > 0 && !(points[i].x > points[i - 1].x))
      throw std::invalid_argument("modulation abscissae must be strictly increasing");
  }
  if (!(tail_slope >= 0.0)) throw std::invalid_argument("modulation tail slope must be nonnegative");
  Modulation m;
  m.kind_ = Kind::Tabulated;
  m.q_ = 0.0;
  m.table_ = std::move(points);
  m.tail_slope_ = tail_slope;
  return m;
}

double Modulation::operator()(double r) const {
  const double a = std::abs(r);
  if (kind_ == Kind::Power) return offset_ + std::pow(a, q_);
  const auto it = std::upper_bound(table_.begin(), table_.end(), a,
                                   [](double v, const Breakpoint& p) { return v < p.x; });
  if (it == table_.end()) return table_.back().y + tail_slope_ * (a - table_.back().x);
  const auto& lo = *(it - 1);
  return lo.y + (it->y - lo.y) * (a - lo.x) / (it->x - lo.x);
}

SemilinearSaturation SemilinearSaturation::standard(Eigen::Index n, double h) {
  Eigen::VectorXd lambda(n), b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double k = static_cast<double>(i + 1);
    lambda(i) = -1.0 / (2.0 * k);
    b(i) = 1.0 / std::sqrt(2.0 * k);
  }
  SemilinearSaturation cfg{DiagonalSemigroup(lambda), b, 1.0, h, {kInfinity, FullLp{}}};
  cfg.validate();
  return cfg;
}

void SemilinearSaturation::validate() const {
  if (b.size() != a.dimension()) throw std::invalid_argument("semilinear system: B and A dimensions differ");
  if ((b.array() <= 0.0).any()) throw std::invalid_argument("semilinear system: b_n must be positive");
  if (((a.eigenvalues().array() - b.array().square()) >= 0.0).any())
    throw std::invalid_argument("semilinear system: need λ_n - b_n² < 0");
  if (c != 1.0) throw std::invalid_argument("semilinear system: radial retraction has c = 1");
  if (!(h > 0.0)) throw std::invalid_argument("semilinear system: step must be positive");
}

const InputSpaceSpec& input_space(const SystemConfig& cfg) {
  return std::visit([](const auto& c) -> const InputSpaceSpec& { return c.input_space; }, cfg);
}

double state_norm(const State& x) {
  return std::visit(overloaded{[](const Eigen::VectorXd& v) { return v.norm(); },
                               [](const TranslationState& f) { return norm(f); }},
                    x);
}

double state_distance(const State& a, const State& b) {
  if (a.index() != b.index()) throw std::invalid_argument("state_distance: different state kinds");
  if (const auto* v = std::get_if<Eigen::VectorXd>(&a)) return (*v - std::get<Eigen::VectorXd>(b)).norm();
  auto diff = std::get<TranslationState>(a) - std::get<TranslationState>(b);
  diff.compact();
  return norm(diff);
}

double radial_retraction_norm(const Eigen::VectorXd& v) { return std::min(1.0, v.norm()); }

Eigen::VectorXd radial_retraction(const Eigen::VectorXd& v) {
  const double n = v.norm();
  return n <= 1.0 ? v : Eigen::VectorXd(v / n);
}

double dilated_time(const Modulation& alpha, const Signal& u, double t) {
  const long n = aligned_steps(t, u.dt(), "dilated_time");
  Eigen::VectorXd a(n + 1);
  for (long k = 0; k <= n; ++k) a(k) = alpha(u.magnitude(k));
  return trapezoid(a, u.dt());
}

State flow_modulated(const ModulatedLinear& cfg, double t, const Eigen::VectorXd& x0, const Signal& u) {
  return apply_diagonal(cfg.semigroup, dilated_time(cfg.alpha, u, t), x0);
}

State flow_linear(const LinearDuhamel& cfg, double t, const TranslationState& x0, const Signal& u) {
  auto out = apply_translation(cfg.semigroup, t, x0);
  if (!u.is_zero()) out += duhamel_translation(cfg.semigroup, cfg.kernel, u, t);
  out.compact();
  return out;
}

State flow_semilinear(const SemilinearSaturation& cfg, double t, const Eigen::VectorXd& x0,
                      const Signal& u) {
  aligned_steps(t, u.dt(), "semilinear flow");
  if (x0.size() != cfg.b.size()) throw std::invalid_argument("semilinear flow: state dimension mismatch");
  SemilinearMarch march(cfg, x0, u);
  return march.at(t);
}

State flow(const SystemConfig& cfg, double t, const State& x0, const Signal& u) {
  return std::visit(
      overloaded{[&](const ModulatedLinear& c) { return flow_modulated(c, t, vector_state(x0, "flow"), u); },
                 [&](const LinearDuhamel& c) { return flow_linear(c, t, translation_state(x0, "flow"), u); },
                 [&](const SemilinearSaturation& c) {
                   return flow_semilinear(c, t, vector_state(x0, "flow"), u);
                 }},
      cfg);
}

double Trajectory::sup_norm() const {
  return norms.empty() ? 0.0 : *std::max_element(norms.begin(), norms.end());
}

double record_step(const SystemConfig&, const Signal& u) { return u.dt(); }

Trajectory simulate(const SystemConfig& cfg, const State& x0, const Signal& u, double horizon,
                    int snapshot_every) {
  const double dt = record_step(cfg, u);
  const long n = aligned_steps(horizon, dt, "simulate");
  if (snapshot_every < 1) throw std::invalid_argument("simulate: snapshot interval must be >= 1");
  Trajectory traj;
  traj.times.reserve(n + 1);
  traj.norms.reserve(n + 1);
  auto record = [&](long k, const State& x) {
    traj.times.push_back(dt * static_cast<double>(k));
    traj.norms.push_back(state_norm(x));
    if (k % snapshot_every == 0) traj.snapshots.emplace_back(traj.times.back(), x);
  };

  std::visit(
      overloaded{
          [&](const ModulatedLinear& c) {
            const auto& x = vector_state(x0, "simulate");
            double v = 0.0;
            double prev = c.alpha(u.magnitude(0));
            for (long k = 0; k <= n; ++k) {
              if (k > 0) {
                const double cur = c.alpha(u.magnitude(k));
                v += 0.5 * dt * (prev + cur);
                prev = cur;
              }
              record(k, State(apply_diagonal(c.semigroup, v, x)));
            }
          },
          [&](const LinearDuhamel& c) {
            TranslationState x = translation_state(x0, "simulate");
            record(0, x);
            for (long k = 1; k <= n; ++k) {
              x = apply_translation(c.semigroup, dt, x);
              const Signal rest = shift(u, dt * static_cast<double>(k - 1));
              if (!rest.is_zero()) x += duhamel_translation(c.semigroup, c.kernel, rest, dt);
              x.compact();
              record(k, x);
            }
          },
          [&](const SemilinearSaturation& c) {
            const auto& x = vector_state(x0, "simulate");
            if (x.size() != c.b.size()) throw std::invalid_argument("simulate: state dimension mismatch");
            SemilinearMarch march(c, x, u);
            for (long k = 0; k <= n; ++k) record(k, State(march.at(dt * static_cast<double>(k))));
          }},
      cfg);
  return traj;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,norm\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    os << format_double(traj.times[i]) << ',' << format_double(traj.norms[i]) << '\n';
}

AxiomReport check_axioms(const SystemConfig& cfg, const std::vector<AxiomSample>& plan) {
  AxiomReport report;
  for (const auto& smp : plan) {
    report.identity = std::max(report.identity, state_distance(flow(cfg, 0.0, smp.x0, smp.u), smp.x0));
    const State mid = flow(cfg, smp.s, smp.x0, smp.u);
    const State direct = flow(cfg, smp.s + smp.t, smp.x0, smp.u);
    const State split = flow(cfg, smp.t, mid, shift(smp.u, smp.s));
    report.cocycle = std::max(report.cocycle, state_distance(direct, split));
    report.causality = std::max(
        report.causality, state_distance(flow(cfg, smp.tau, smp.x0, smp.u), flow(cfg, smp.tau, smp.x0, smp.u_alt)));
    const double step = record_step(cfg, smp.u);
    report.continuity = std::max(
        report.continuity, state_distance(flow(cfg, smp.t + step, smp.x0, smp.u), flow(cfg, smp.t, smp.x0, smp.u)));
    ++report.samples;
  }
  return report;
}

std::vector<AxiomSample> make_axiom_plan(const SystemConfig& cfg, std::size_t count,
                                         std::uint64_t seed, double dt, double max_time) {
  const long max_steps = grid_steps(max_time, dt);
  if (max_steps < 2) throw std::invalid_argument("axiom plan: max_time must span at least two steps");
  std::vector<AxiomSample> plan;
  plan.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto g = sample_rng(seed, i);
    const double s = dt * static_cast<double>(uniform_int(g, 0, max_steps / 2));
    const double t = dt * static_cast<double>(uniform_int(g, 0, max_steps / 2 - 1));
    const double tau = dt * static_cast<double>(uniform_int(g, 0, max_steps));
    const double length = dt * static_cast<double>(uniform_int(g, 1, max_steps));

    std::visit(overloaded{
                   [&](const ModulatedLinear& c) {
                     State x0 = random_vector(g, c.semigroup.dimension(), 1.0);
                     Signal u = random_scalar_input(g, dt, length, 2.0);
                     Signal alt = diverging_copy(g, u, tau, 2.0);
                     plan.push_back({std::move(x0), std::move(u), std::move(alt), s, t, tau});
                   },
                   [&](const LinearDuhamel& c) {
                     if (std::abs(dt - c.semigroup.step()) > 1e-12 * dt)
                       throw std::invalid_argument("axiom plan: dt must equal the spatial step");
                     Eigen::VectorXd w = Eigen::VectorXd::Zero(c.semigroup.window_size());
                     const long support = uniform_int(g, 1, w.size() - 1);
                     w.head(support) = random_vector(g, support, 1.0);
                     std::vector<TailTerm> tail;
                     if (g() % 2) tail.push_back({TailTerm::Kind::Power, uniform(g, -1.0, 1.0), 0.0, 1.0});
                     State x0 = TranslationState(dt, std::move(w), std::move(tail));
                     Signal u = random_scalar_input(g, dt, length, 1.0);
                     Signal alt = diverging_copy(g, u, tau, 1.0);
                     plan.push_back({std::move(x0), std::move(u), std::move(alt), s, t, tau});
                   },
                   [&](const SemilinearSaturation& c) {
                     const Eigen::Index n = c.b.size();
                     Eigen::VectorXd x = random_vector(g, n, 1.0);
                     x *= uniform(g, 0.0, 3.0) / std::max(x.norm(), 1e-300);
                     Signal u = random_smooth_input(g, n, dt, max_time + dt, 1.0);
                     Signal alt = diverging_copy(g, u, tau, 1.0);
                     plan.push_back({State(std::move(x)), std::move(u), std::move(alt), s, t, tau});
                   }},
               cfg);
  }
  return plan;
}

}  // namespace wiss
