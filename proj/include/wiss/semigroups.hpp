#pragma once

// Concrete contraction semigroups: diagonal operators on truncated l², and the
// left translation on a gridded L²(0, ∞) window with an analytic tail.

#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "wiss/signals.hpp"

namespace wiss {

/// e^{A v} for A = diag(λ_1, ..., λ_N), λ_n ≤ 0.
template <typename Scalar>
class BasicDiagonalSemigroup {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit BasicDiagonalSemigroup(Vector eigenvalues) : eigenvalues_(std::move(eigenvalues)) {
    if (eigenvalues_.size() == 0) throw std::invalid_argument("diagonal semigroup needs N >= 1");
    if ((eigenvalues_.array() > Scalar(0)).any() || !eigenvalues_.allFinite())
      throw std::invalid_argument("diagonal semigroup eigenvalues must be finite and <= 0");
  }

  /// λ_n = -1/n: every orbit decays, but no uniform exponential rate as N grows.
  static BasicDiagonalSemigroup strongly_stable(Eigen::Index n) {
    Vector lambda(n);
    for (Eigen::Index i = 0; i < n; ++i) lambda(i) = -Scalar(1) / Scalar(i + 1);
    return BasicDiagonalSemigroup(std::move(lambda));
  }

  const Vector& eigenvalues() const { return eigenvalues_; }
  Eigen::Index dimension() const { return eigenvalues_.size(); }

 private:
  Vector eigenvalues_;
};

using DiagonalSemigroup = BasicDiagonalSemigroup<double>;

/// e^{A v} x for the diagonal semigroup; v ≥ 0 is the elapsed (possibly dilated) time.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply_diagonal(const BasicDiagonalSemigroup<Scalar>& s,
                                                        Scalar v,
                                                        const Eigen::MatrixBase<Derived>& x) {
  if (v < Scalar(0)) throw std::domain_error("apply_diagonal: negative time");
  if (x.size() != s.dimension()) throw std::invalid_argument("apply_diagonal: dimension mismatch");
  return ((s.eigenvalues().array() * v).exp() * x.derived().array()).matrix();
}

/// One analytic tail term: coeff (ζ + offset)^(-exponent) for power terms,
/// coeff exp(-exponent (ζ + offset)) for exponential terms.
struct TailTerm {
  enum class Kind { Power, Exp };
  Kind kind = Kind::Power;
  double coeff = 0.0;
  double offset = 0.0;
  double exponent = 1.0;

  double operator()(double zeta) const;
};

/// Element of L²(0, ∞): samples at ζ_k = k step (k < K) and a finite sum of analytic
/// terms describing ζ > (K-1) step.
class TranslationState {
 public:
  TranslationState(double step, Eigen::VectorXd window, std::vector<TailTerm> tail = {});

  static TranslationState zero(double step, Eigen::Index window_size);

  double step() const { return step_; }
  Eigen::Index window_size() const { return window_.size(); }
  double window_end() const { return step_ * static_cast<double>(window_.size() - 1); }
  const Eigen::VectorXd& window() const { return window_; }
  const std::vector<TailTerm>& tail() const { return tail_; }

  double tail_value(double zeta) const;
  /// Value at ζ_k; evaluates the tail beyond the window.
  double value_at(Eigen::Index k) const;

  /// Merges tail terms of equal kind, exponent and offset.
  void compact();

  TranslationState& operator+=(const TranslationState& other);
  TranslationState& operator*=(double factor);

 private:
  double step_;
  Eigen::VectorXd window_;
  std::vector<TailTerm> tail_;
};

TranslationState operator+(TranslationState a, const TranslationState& b);
TranslationState operator-(TranslationState a, const TranslationState& b);
TranslationState operator*(double factor, TranslationState a);

/// L²(0, ∞) norm: trapezoid over the window plus quadrature of the tail.
double norm(const TranslationState& f);

/// ∫_Z^∞ F(ζ)² dζ for a tail profile decaying at least like ζ^(-min_exponent).
double tail_square_integral(const std::function<double(double)>& profile, double start,
                            double min_exponent);

/// Left translation e^{At} f = f(· + t) on a grid of spacing step over the window [0, Z].
class TranslationSemigroup {
 public:
  TranslationSemigroup(double step, double window_length);

  double step() const { return step_; }
  double window_length() const { return window_length_; }
  Eigen::Index window_size() const { return window_size_; }

 private:
  double step_;
  double window_length_;
  Eigen::Index window_size_;
};

TranslationState apply_translation(const TranslationSemigroup& s, double t, const TranslationState& f);

/// Input kernel b ∈ L²(0, ∞), b ≥ 0, so that B v = v b.
class Kernel {
 public:
  explicit Kernel(TranslationState profile);

  /// b(ζ) = 1/ζ on [1, ∞), 0 before; the jump node ζ = 1 carries the mean value ½.
  static Kernel inverse_zeta(const TranslationSemigroup& s);
  /// b(ζ) = e^{-rate ζ}.
  static Kernel exponential(const TranslationSemigroup& s, double rate);

  const TranslationState& profile() const { return profile_; }
  double value_at(Eigen::Index k) const { return profile_.value_at(k); }
  /// True when the tail certifies b ∈ L¹.
  bool integrable() const;
  /// ∫_0^x b(ζ) dζ: cumulative trapezoid on the window, closed form on the tail.
  double antiderivative(double x) const;

 private:
  TranslationState profile_;
  Eigen::VectorXd cumulative_;
};

/// Φ_t(u)(ζ) = ∫_0^t u(s) b(ζ + t - s) ds by the trapezoid rule in s; dt must equal
/// the spatial step and t must be grid-aligned.
TranslationState duhamel_translation(const TranslationSemigroup& s, const Kernel& b,
                                     const Signal& u, double t);

/// ‖∫_0^τ b(· + s) ds‖_{L²}, from the kernel antiderivative and an outer quadrature.
double growth_norm(const TranslationSemigroup& s, const Kernel& b, double tau);

}  // namespace wiss
