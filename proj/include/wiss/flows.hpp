#pragma once

// Flow maps φ(t, x0, u) of the three system families and a checker for the
// dynamical-system axioms (identity, cocycle, causality, continuity).

#include <cstdint>
#include <iosfwd>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "wiss/comparison.hpp"
#include "wiss/semigroups.hpp"
#include "wiss/signals.hpp"

namespace wiss {

/// Even, nonnegative input modulation α(r) = α(|r|), applied to the Euclidean
/// magnitude of vector inputs.
class Modulation {
 public:
  /// |r|^q
  static Modulation power(double q);
  /// offset + |r|^q
  static Modulation affine(double offset, double q);
  /// Piecewise-linear in |r| through (r_i, α_i), r_0 = 0, then slope tail_slope ≥ 0.
  static Modulation tabulated(std::vector<Breakpoint> points, double tail_slope);

  double operator()(double r) const;
  double at_zero() const { return (*this)(0.0); }
  /// Exponent q of the power part; 0 for tabulated modulations.
  double exponent() const { return q_; }

 private:
  enum class Kind { Power, Tabulated };
  Modulation() = default;
  Kind kind_ = Kind::Power;
  double offset_ = 0.0;
  double q_ = 1.0;
  std::vector<Breakpoint> table_;
  double tail_slope_ = 0.0;
};

/// x' = α(u(t)) A x with A diagonal: φ(t, x0, u) = e^{A v(t)} x0, v(t) = ∫_0^t α(u).
struct ModulatedLinear {
  DiagonalSemigroup semigroup;
  Modulation alpha;
  InputSpaceSpec input_space;
};

/// Left translation with input operator v ↦ v b: φ = x0(· + t) + ∫_0^t u(s) b(· + t - s) ds.
struct LinearDuhamel {
  TranslationSemigroup semigroup;
  Kernel kernel;
  InputSpaceSpec input_space;
};

/// x' = A x - B g(B x) + B u with A, B diagonal and g(v) = v / max(1, ‖v‖).
struct SemilinearSaturation {
  DiagonalSemigroup a;
  Eigen::VectorXd b;
  double c = 1.0;
  double h = 0.01;
  InputSpaceSpec input_space;

  /// λ_n = -1/(2n), b_n = 1/√(2n), so that A - B B* = diag(-1/n).
  static SemilinearSaturation standard(Eigen::Index n, double h);
  /// Throws unless b_n > 0, λ_n - b_n² < 0, c = 1 and h > 0.
  void validate() const;
};

using SystemConfig = std::variant<ModulatedLinear, LinearDuhamel, SemilinearSaturation>;

using State = std::variant<Eigen::VectorXd, TranslationState>;

const InputSpaceSpec& input_space(const SystemConfig& cfg);

double state_norm(const State& x);
double state_distance(const State& a, const State& b);

double radial_retraction_norm(const Eigen::VectorXd& v);
Eigen::VectorXd radial_retraction(const Eigen::VectorXd& v);

/// v(t) = ∫_0^t α(u(s)) ds by the trapezoid rule on the input grid.
double dilated_time(const Modulation& alpha, const Signal& u, double t);

State flow_modulated(const ModulatedLinear& cfg, double t, const Eigen::VectorXd& x0, const Signal& u);
State flow_linear(const LinearDuhamel& cfg, double t, const TranslationState& x0, const Signal& u);
/// Exponential Euler: x_{k+1} = e^{A h_k} (x_k + h_k (-B g(B x_k) + B u(t_k))), with
/// h_k = h except for a shorter final step; t must lie on the input grid.
State flow_semilinear(const SemilinearSaturation& cfg, double t, const Eigen::VectorXd& x0,
                      const Signal& u);
State flow(const SystemConfig& cfg, double t, const State& x0, const Signal& u);

struct Trajectory {
  std::vector<double> times;
  std::vector<double> norms;
  /// (time, state) every `snapshot_every` recorded steps.
  std::vector<std::pair<double, State>> snapshots;

  double sup_norm() const;
};

/// Spacing of recorded trajectory times for this configuration and input.
double record_step(const SystemConfig& cfg, const Signal& u);

Trajectory simulate(const SystemConfig& cfg, const State& x0, const Signal& u, double horizon,
                    int snapshot_every = 16);

void write_csv(std::ostream& os, const Trajectory& traj);

struct AxiomSample {
  State x0;
  Signal u;
  /// Agrees with u on [0, tau].
  Signal u_alt;
  double s = 0.0;
  double t = 0.0;
  double tau = 0.0;
};

struct AxiomReport {
  double identity = 0.0;
  double cocycle = 0.0;
  double causality = 0.0;
  /// max ‖φ(t + δ) - φ(t)‖ over one recorded step δ.
  double continuity = 0.0;
  std::size_t samples = 0;
};

AxiomReport check_axioms(const SystemConfig& cfg, const std::vector<AxiomSample>& plan);

/// Seeded plan with family-appropriate random states, inputs and times; every
/// time is a multiple of `dt` and at most `max_time`.
std::vector<AxiomSample> make_axiom_plan(const SystemConfig& cfg, std::size_t count,
                                         std::uint64_t seed, double dt, double max_time);

}  // namespace wiss
