#pragma once

// Per-trajectory decay envelopes β(x0, u, ·) built from a stability bound σx = σ̲(‖x0‖)
// and an eventual threshold γ(‖u‖), and the checks that the envelope bounds the norm.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wiss/comparison.hpp"
#include "wiss/flows.hpp"

namespace wiss {

enum class EnvelopeCase { ZeroInitial, EventuallyBelow, NeverSettles };

const char* to_string(EnvelopeCase c);

/// How much the sampled tail can be trusted when it already lies below the threshold.
enum class TailPolicy {
  /// Finite-window verdict; flagged as conditional on the horizon.
  HorizonConditional,
  /// The caller knows the norm stays below the threshold after the horizon.
  Certified,
};

/// Raised when the trajectory norm exceeds σx + threshold.
struct StabilityBoundViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a required level is still exceeded at the last sample.
struct HorizonTooShort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Classification {
  EnvelopeCase kind = EnvelopeCase::ZeroInitial;
  bool horizon_conditional = false;
  /// Last time the norm exceeds the threshold (EventuallyBelow only; 0 if never).
  double tau_inf = 0.0;
};

Classification classify(const Trajectory& traj, double threshold,
                        TailPolicy policy = TailPolicy::HorizonConditional);

/// Unique k ≥ 1 with σx/(k+1) + threshold < sup_norm ≤ σx/k + threshold.
int compute_k(double sup_norm, double sigma_x, double threshold);

/// Last time the norm exceeds `level`, refined by linear interpolation towards the
/// next sample; 0 when the level is never exceeded, and nullopt when it is
/// exceeded at the final sample.
std::optional<double> last_exceedance(const Trajectory& traj, double level);

/// τ_0 = 0 and τ_n for the levels σx/(k+n) + threshold, n = 1..N, where N is the
/// number of levels whose last exceedance lies strictly inside the horizon (at most
/// max_levels).
std::vector<double> crossing_times(const Trajectory& traj, double sigma_x, double threshold, int k,
                                   int max_levels = 4096);

struct EnvelopeOptions {
  TailPolicy tail_policy = TailPolicy::HorizonConditional;
  /// Exponential rate of β after its last interpolation point; lowered when needed
  /// to keep β above the known step levels.
  double tail_rate = 1.0;
  int max_levels = 4096;
};

struct EnvelopeResult {
  EnvelopeCase kind = EnvelopeCase::ZeroInitial;
  bool horizon_conditional = false;
  double sigma_x = 0.0;
  double gain_value = 0.0;
  int k = 0;
  /// τ_0 = 0 < τ_1 < ... (NeverSettles); {0, τ_∞} for EventuallyBelow.
  std::vector<double> taus;
  /// Step levels on [taus[i], taus[i+1]); the last level extends to the horizon.
  std::vector<double> levels;
  /// Absent for ZeroInitial, where β ≡ 0.
  std::optional<DecayFn> beta;
  /// Number of τ_n used as interpolation points of β.
  int interpolated_levels = 0;

  double beta0_at(double t) const;
  double beta_at(double t) const;
};

/// Builds β from a sampled trajectory (norms[0] = ‖x0‖) following the case split.
EnvelopeResult build_envelope(const Trajectory& traj, double sigma_x, double gain_value,
                              const EnvelopeOptions& options = {});

struct ItemIIIReport {
  bool passed = true;
  std::size_t violations = 0;
  /// max over grid of ‖φ(t)‖ - β(t) - gain; ≤ 0 when the bound holds.
  double worst_excess = -kInfinity;
  double worst_time = 0.0;
  /// max over grid of β(t) - σ(‖x0‖).
  double worst_beta_excess = -kInfinity;
  std::string detail;
};

/// ‖φ(t)‖ ≤ β(t) + gain + 1e-9 and β(t) ≤ σ(‖x0‖) + 1e-9 at every grid time.
ItemIIIReport verify_item_iii(const Trajectory& traj, const EnvelopeResult& env, const CompFn& sigma);

struct EnvelopeInvariants {
  bool beta_strictly_decreasing = true;
  bool beta_dominates_step = true;
  bool beta_below_twice_sigma = true;
  bool step_dominates_norm = true;
  /// max |level_n - σx/(k+n)|.
  double level_error = 0.0;

  bool all() const {
    return beta_strictly_decreasing && beta_dominates_step && beta_below_twice_sigma && step_dominates_norm;
  }
};

/// β ≥ β0, β ≤ 2σx, ‖φ‖ ≤ β0 + gain on the grid, β strictly decreasing.
EnvelopeInvariants check_envelope_invariants(const Trajectory& traj, const EnvelopeResult& env);

/// Columns t,norm,beta0,beta,gain.
void write_envelope_csv(std::ostream& os, const Trajectory& traj, const EnvelopeResult& env);

}  // namespace wiss
