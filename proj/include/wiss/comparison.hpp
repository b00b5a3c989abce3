#pragma once

// Comparison functions: class K gains and class L decay profiles as monotone
// piecewise-linear objects with analytic tails.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wiss {

/// Slope added to flat running-maximum fits so that they are strictly increasing.
inline constexpr double kSlopeEpsilon = 1e-9;

struct Breakpoint {
  double x = 0.0;
  double y = 0.0;
};

/// Class-K function: continuous, strictly increasing, zero at zero.
///
/// Stored as breakpoints (0,0) = (x_0,y_0) < (x_1,y_1) < ... joined linearly, extended
/// past the last breakpoint with slope tail_slope > 0.
class CompFn {
 public:
  CompFn(std::vector<Breakpoint> points, double tail_slope);

  static CompFn identity();
  static CompFn linear(double slope);

  double operator()(double r) const;
  double inverse(double y) const;

  const std::vector<Breakpoint>& breakpoints() const { return points_; }
  double tail_slope() const { return tail_slope_; }

  /// Same function multiplied by a positive constant.
  CompFn scaled(double factor) const;

 private:
  std::vector<Breakpoint> points_;
  double tail_slope_;
};

/// Class-L function: continuous, strictly decreasing, positive, tending to zero.
///
/// Breakpoints start at t = 0; beyond the last one the value decays as
/// y_last * exp(-tail_rate * (t - t_last)).
class DecayFn {
 public:
  DecayFn(std::vector<Breakpoint> points, double tail_rate);

  double operator()(double t) const;

  const std::vector<Breakpoint>& breakpoints() const { return points_; }
  double tail_rate() const { return tail_rate_; }

 private:
  std::vector<Breakpoint> points_;
  double tail_rate_;
};

/// Gain in K ∪ {0}; asymptotic gains may be identically zero.
class Gain {
 public:
  Gain() = default;
  Gain(CompFn f) : fn_(std::move(f)) {}  // NOLINT(google-explicit-constructor)

  static Gain zero() { return Gain(); }

  double operator()(double r) const;
  bool is_zero() const { return !fn_.has_value(); }
  const CompFn* function() const { return fn_ ? &*fn_ : nullptr; }

 private:
  std::optional<CompFn> fn_;
};

double eval(const CompFn& f, double r);
double eval(const DecayFn& f, double t);
double inverse(const CompFn& f, double y);

/// r ↦ sigma(2 limit_gain(r)) + stability_gain(r): the asymptotic gain obtained from a
/// uniform global stability pair (sigma, stability_gain) and a weak limit gain.
CompFn asymptotic_gain_from_limit(const CompFn& sigma, const CompFn& stability_gain,
                                  const CompFn& limit_gain);

/// Tolerance ½ sigma⁻¹(eps) used when converting a weak limit time into an
/// asymptotic gain time.
double limit_tolerance(const CompFn& sigma, double eps);

/// (2 sigma, max(stability_gain, asymptotic_gain)): the comparison pair of the
/// trajectory envelope construction.
std::pair<CompFn, CompFn> envelope_comparison_pair(const CompFn& sigma,
                                                   const CompFn& stability_gain,
                                                   const CompFn& asymptotic_gain);

/// Pointwise maximum, exact on the union of breakpoints and crossing points.
CompFn pointwise_max(const CompFn& f, const CompFn& g);

/// Smallest-by-construction class-K majorant of (r, y) samples: running maximum,
/// linear interpolation, lifted by `slope_eps * r`.
CompFn fit_k_upper(std::span<const Breakpoint> samples, double slope_eps = kSlopeEpsilon);

// Text records: one header line, then `r,value` rows.
void write_csv(std::ostream& os, std::string_view name, const CompFn& f);
void write_csv(std::ostream& os, std::string_view name, const DecayFn& f);
CompFn read_comp_fn(std::istream& is, std::string* name = nullptr);
DecayFn read_decay_fn(std::istream& is, std::string* name = nullptr);

}  // namespace wiss
