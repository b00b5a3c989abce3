#pragma once

// Sampled input signals u: [0, ∞) → R^m on a uniform grid, with an analytic tail
// beyond the sampled window.

#include <iosfwd>
#include <limits>
#include <variant>

#include <Eigen/Dense>

namespace wiss {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct ZeroTail {};
/// coeff * exp(-rate * (t - origin))
struct ExpTail {
  double coeff = 0.0;
  double rate = 1.0;
  double origin = 0.0;
};
/// coeff * (t - origin)^(-exponent); origin lies before the window end.
struct PowerTail {
  double coeff = 0.0;
  double exponent = 1.0;
  double origin = 0.0;
};
struct ConstantTail {
  double value = 0.0;
};
using Tail = std::variant<ZeroTail, ExpTail, PowerTail, ConstantTail>;

/// Scalar tail profile at absolute time t (no direction applied).
double tail_profile(const Tail& tail, double t);

/// Input signal: window samples u(k dt), k = 0..K-1, joined linearly; for
/// t > (K-1) dt the value is tail_profile(t) * direction.
class Signal {
 public:
  /// `values` is m × K (one column per grid time).
  Signal(double dt, Eigen::MatrixXd values, Tail tail = ZeroTail{},
         Eigen::VectorXd direction = Eigen::VectorXd());

  static Signal zero(double dt, Eigen::Index dim = 1);
  static Signal scalar(double dt, const Eigen::VectorXd& values, Tail tail = ZeroTail{});

  double dt() const { return dt_; }
  Eigen::Index dim() const { return values_.rows(); }
  Eigen::Index window_size() const { return values_.cols(); }
  double window_end() const { return dt_ * static_cast<double>(values_.cols() - 1); }
  const Eigen::MatrixXd& window() const { return values_; }
  const Tail& tail() const { return tail_; }
  const Eigen::VectorXd& direction() const { return direction_; }

  /// Value at grid time k dt (window sample or analytic tail).
  Eigen::VectorXd sample(Eigen::Index k) const;
  /// First component at grid time k dt.
  double sample_scalar(Eigen::Index k) const;
  /// Euclidean magnitude at grid time k dt.
  double magnitude(Eigen::Index k) const;
  /// Value at arbitrary t ≥ 0; linear between window samples.
  Eigen::VectorXd at(double t) const;

  bool is_zero() const;

 private:
  double dt_;
  Eigen::MatrixXd values_;
  Tail tail_;
  Eigen::VectorXd direction_;
};

/// ‖u‖_p on [0, ∞): trapezoid rule over the window plus the closed-form tail
/// integral; p = kInfinity gives the grid maximum joined with the tail supremum.
double lp_norm(const Signal& u, double p);

/// u(· + tau); tau must be a multiple of dt.
Signal shift(const Signal& u, double tau);

/// u1 on [0, tau), u2(· - tau) afterwards; tau must be a multiple of dt.
Signal concat(const Signal& u1, const Signal& u2, double tau);

/// Input space constraints.
struct FullLp {};
/// Inputs with finite L^p norm but ∫ |u|^q = ∞ (modulation α(r) = |r|^q).
struct AlphaDivergent {
  double q = 1.0;
};
struct EventuallyExpDecaying {};
struct LInfty0 {};
using InputConstraint = std::variant<FullLp, AlphaDivergent, EventuallyExpDecaying, LInfty0>;

struct InputSpaceSpec {
  double p = 2.0;
  InputConstraint constraint = FullLp{};

  /// Throws on inconsistent (p, constraint) combinations.
  void validate() const;
};

/// Constructive membership check through the window and the tail descriptor.
bool admits(const InputSpaceSpec& space, const Signal& u);

/// Tail exponent e with p e > 1 ≥ q e used by make_alpha_divergent.
double alpha_divergence_exponent(double p, double q);

/// Finite L^p input with ∫ |u|^q ds = ∞: a ramp 0 → amplitude on [0, 1] followed by
/// amplitude s^(-e) (p < ∞), or the constant amplitude (p = ∞).
Signal make_alpha_divergent(double p, double q, double amplitude, double dt);

/// Window samples followed by the tail coeff * exp(-rate (t - window_end)).
Signal make_eventually_exp_decaying(double dt, const Eigen::MatrixXd& window, double coeff,
                                    double rate);

// CSV: a `# signal ...` tail descriptor line, a `t,u_1,...,u_m` header, then rows.
void write_csv(std::ostream& os, const Signal& u);
Signal read_signal_csv(std::istream& is);

}  // namespace wiss
