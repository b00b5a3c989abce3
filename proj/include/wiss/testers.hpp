#pragma once

// Estimators and falsifiers for stability and asymptotic gain properties of a
// configured system, including the adversarial inputs that separate weak from
// strong gains.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wiss/comparison.hpp"
#include "wiss/flows.hpp"

namespace wiss {

enum class Property { UGS, ULS, ZeroInputUGS, WAG, WAG0, SAG, UAG, WLIM };
enum class VerdictStatus { Witnessed, Falsified, Inconclusive };

const char* to_string(Property p);
const char* to_string(VerdictStatus s);

/// ‖φ(t, x0, u)‖ > bound, with margin = ‖φ‖ - bound at the time of recording.
struct Counterexample {
  State x0;
  Signal u;
  double t = 0.0;
  double bound = 0.0;
  double margin = 0.0;
};

struct PropertyVerdict {
  Property property = Property::UGS;
  VerdictStatus status = VerdictStatus::Inconclusive;
  std::string evidence;
  std::vector<std::pair<std::string, CompFn>> fitted;
  /// (time, value) pairs such as (τ̄, margin) or (ε, τ̄).
  std::vector<std::pair<double, double>> series;
  std::optional<Counterexample> counterexample;
  double horizon = 0.0;
  std::size_t budget = 0;
};

/// ‖φ(t, x0, u)‖ - bound, recomputed from scratch.
double replay(const SystemConfig& cfg, const Counterexample& cx);

/// Zero state of the configured family.
State zero_state(const SystemConfig& cfg);

struct StabilitySample {
  State x0;
  Signal u;
};

struct UgsPlan {
  std::vector<State> initial_states;  // zero-input runs, fit σ̲
  std::vector<Signal> inputs;         // zero-state runs, fit γ̲
  std::vector<StabilitySample> held_out;
  double horizon = 10.0;
  double p = 2.0;
  /// Input grid for the zero-input runs.
  double dt = 0.01;
};

/// Checks sup_t ‖φ(t, x0, u)‖ ≤ σ̲(‖x0‖) + γ̲(‖u‖_p) on every sample; reports the
/// largest violation as a replayable counterexample.
PropertyVerdict check_stability_bound(const SystemConfig& cfg, Property tag, const CompFn& sigma,
                                      const CompFn& gamma, const std::vector<StabilitySample>& samples,
                                      double horizon, double p);

/// Fits σ̲ from the zero-input runs and γ̲ from the zero-state runs with fit_k_upper,
/// then validates the bound on the held-out samples.
PropertyVerdict estimate_ugs(const SystemConfig& cfg, const UgsPlan& plan);

/// First grid time after which ‖φ‖ ≤ ε + gain_value for every remaining sample;
/// nullopt if the final sample still exceeds the bound.
std::optional<double> weak_ag_time(const Trajectory& traj, double eps, double gain_value);
std::optional<double> weak_ag_time(const SystemConfig& cfg, double eps, const State& x0, const Signal& u,
                                   const Gain& gain, double horizon, double p);

/// First grid time at which ‖φ‖ ≤ ε + gain_value.
std::optional<double> weak_limit_time(const Trajectory& traj, double eps, double gain_value);
std::optional<double> weak_limit_time(const SystemConfig& cfg, double eps, const State& x0, const Signal& u,
                                      const Gain& gain, double horizon, double p);

struct AttackOptions {
  double eps = 1.0;
  /// ‖x0‖ = eps + gain(‖u0‖) + pad.
  double pad = 1.0;
  std::vector<double> candidate_times = {1.0, 10.0, 100.0, 1000.0};
  double p = 2.0;
};

/// Strong asymptotic gain falsifier for modulations with α(0) = 0: for every
/// candidate τ̄, u = 0 on [0, τ̄] followed by u0 leaves x0 untouched up to τ̄, so
/// ‖φ(τ̄)‖ = ‖x0‖ > eps + gain(‖u‖). Throws std::invalid_argument when α(0) ≠ 0.
PropertyVerdict strong_ag_attack(const ModulatedLinear& cfg, const Eigen::VectorXd& direction,
                                 const Signal& u0, const Gain& gain, const AttackOptions& options = {});

/// τ̄ = v̄/c + r̄^p/δ^p for p < ∞, v̄/c for p = ∞.
double modulated_time_bound(double v_bar, double c, double r_bar, double delta, double p);

struct StrongTime {
  double v_bar = 0.0;
  double c = 0.0;
  double r_bar = 0.0;
  double delta = 0.0;
  double tau_bar = 0.0;
};

/// Smallest v (to 1e-6) with ‖e^{A v} x0‖ ≤ eps.
double dilation_needed(const DiagonalSemigroup& s, const Eigen::VectorXd& x0, double eps);

/// Explicit strong asymptotic gain time for a modulated system on full L^p inputs,
/// with r̄ = ‖x0‖ and c the grid minimum of α over [-δ, δ] (p < ∞) or [-r̄, r̄]
/// (p = ∞). Throws when α(0) = 0 and p < ∞.
StrongTime strong_ag_witness_modulated(const ModulatedLinear& cfg, double eps, const Eigen::VectorXd& x0,
                                       double delta = 1.0);

/// sup over the ball sample of ‖φ(t, x0, 0)‖: scaled basis vectors r e_i and
/// `random_count` seeded points on the sphere of radius r.
double uniform_ag_probe(const SystemConfig& cfg, double r, double t, std::size_t random_count,
                        std::uint64_t seed, double dt);

struct Wag0Sample {
  State x0;
  Signal u;
};

struct Wag0Outcome {
  double eps = 0.0;
  double t0 = 0.0;
  std::optional<double> tau;
  /// max ‖φ(t)‖ over [t0 + τ, horizon].
  double worst = 0.0;
  bool passed = false;
};

struct Wag0Report {
  std::vector<Wag0Outcome> outcomes;
  bool passed = true;
  double min_margin = kInfinity;
};

/// For inputs whose shifts vanish in norm: choose t0 with gain(‖u(· + t0)‖) ≤ ε,
/// restart at φ(t0), find its weak gain time τ, and check ‖φ(t)‖ ≤ 2ε on
/// [t0 + τ, horizon]. Throws unless the input space is L^p (p < ∞) or L^∞_0.
Wag0Report wag_implies_wag0_check(const SystemConfig& cfg, const std::vector<Wag0Sample>& samples,
                                  const std::vector<double>& eps_grid, const Gain& gain, double horizon);

/// Smallest grid t0 with gain(‖u(· + t0)‖_p) ≤ eps.
double vanishing_shift_time(const Signal& u, double p, const Gain& gain, double eps);

// One block per verdict; CSV: property,status,horizon,budget,t,bound,margin.
void write_report(std::ostream& os, const std::vector<PropertyVerdict>& verdicts);
void write_verdicts_csv(std::ostream& os, const std::vector<PropertyVerdict>& verdicts);

}  // namespace wiss
