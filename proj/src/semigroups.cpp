#include "wiss/semigroups.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wiss/quadrature.hpp"

namespace wiss {
namespace {

const GaussLegendreRule<double>& tail_rule() {
  static const GaussLegendreRule<double> rule = gauss_legendre<double>(16);
  return rule;
}

// ∫_a^b of a single tail term.
double term_integral(const TailTerm& term, double a, double b) {
  if (term.kind == TailTerm::Kind::Exp) {
    const double r = term.exponent;
    return term.coeff / r * (std::exp(-r * (a + term.offset)) - std::exp(-r * (b + term.offset)));
  }
  const double e = term.exponent;
  if (e == 1.0) return term.coeff * std::log((b + term.offset) / (a + term.offset));
  return term.coeff / (1.0 - e) *
         (std::pow(b + term.offset, 1.0 - e) - std::pow(a + term.offset, 1.0 - e));
}

double min_power_exponent(const std::vector<TailTerm>& terms) {
  double e = kInfinity;
  for (const auto& t : terms)
    if (t.kind == TailTerm::Kind::Power && t.coeff != 0.0) e = std::min(e, t.exponent);
  return e;
}

bool same_step(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

}  // namespace

double TailTerm::operator()(double zeta) const {
  if (kind == Kind::Exp) return coeff * std::exp(-exponent * (zeta + offset));
  return coeff * std::pow(zeta + offset, -exponent);
}

TranslationState::TranslationState(double step, Eigen::VectorXd window, std::vector<TailTerm> tail)
    : step_(step), window_(std::move(window)), tail_(std::move(tail)) {
  if (!(step_ > 0.0)) throw std::invalid_argument("translation state: step must be positive");
  if (window_.size() < 2) throw std::invalid_argument("translation state: window needs two samples");
  if (!window_.allFinite()) throw std::invalid_argument("translation state: window values must be finite");
  for (const auto& t : tail_) {
    if (t.kind == TailTerm::Kind::Power) {
      if (!(t.exponent > 0.5))
        throw std::invalid_argument("translation state: power tail must have exponent > 1/2");
      if (!(window_end() + t.offset > 0.0))
        throw std::invalid_argument("translation state: power tail singular inside the tail region");
    } else if (!(t.exponent > 0.0)) {
      throw std::invalid_argument("translation state: exponential tail needs a positive rate");
    }
  }
}

TranslationState TranslationState::zero(double step, Eigen::Index window_size) {
  return TranslationState(step, Eigen::VectorXd::Zero(window_size));
}

double TranslationState::tail_value(double zeta) const {
  double acc = 0.0;
  for (const auto& t : tail_) acc += t(zeta);
  return acc;
}

double TranslationState::value_at(Eigen::Index k) const {
  if (k < window_.size()) return window_(k);
  return tail_value(step_ * static_cast<double>(k));
}

void TranslationState::compact() {
  // Exponential terms with a common rate differ only by a constant factor.
  for (auto& t : tail_) {
    if (t.kind == TailTerm::Kind::Exp && t.offset != 0.0) {
      t.coeff *= std::exp(-t.exponent * t.offset);
      t.offset = 0.0;
    }
  }
  if (tail_.size() < 2) {
    std::erase_if(tail_, [](const TailTerm& t) { return t.coeff == 0.0; });
    return;
  }
  std::sort(tail_.begin(), tail_.end(), [](const TailTerm& a, const TailTerm& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.exponent != b.exponent) return a.exponent < b.exponent;
    return a.offset < b.offset;
  });
  std::vector<TailTerm> merged;
  merged.reserve(tail_.size());
  for (const auto& t : tail_) {
    if (t.coeff == 0.0) continue;
    if (!merged.empty()) {
      auto& m = merged.back();
      if (m.kind == t.kind && m.exponent == t.exponent &&
          std::abs(m.offset - t.offset) <= 1e-9 * std::max(1.0, std::abs(t.offset))) {
        m.coeff += t.coeff;
        continue;
      }
    }
    merged.push_back(t);
  }
  tail_ = std::move(merged);
}

TranslationState& TranslationState::operator+=(const TranslationState& other) {
  if (!same_step(step_, other.step_) || window_.size() != other.window_.size())
    throw std::invalid_argument("translation states live on different grids");
  window_ += other.window_;
  tail_.insert(tail_.end(), other.tail_.begin(), other.tail_.end());
  return *this;
}

TranslationState& TranslationState::operator*=(double factor) {
  window_ *= factor;
  for (auto& t : tail_) t.coeff *= factor;
  return *this;
}

TranslationState operator+(TranslationState a, const TranslationState& b) {
  a += b;
  return a;
}

TranslationState operator-(TranslationState a, const TranslationState& b) {
  a += -1.0 * b;
  return a;
}

TranslationState operator*(double factor, TranslationState a) {
  a *= factor;
  return a;
}

double tail_square_integral(const std::function<double(double)>& profile, double start,
                            double min_exponent) {
  // ζ = start v^(-m) maps (0, 1] onto [start, ∞); m removes the endpoint
  // singularity of slowly decaying power tails.
  double m = 1.0;
  if (std::isfinite(min_exponent)) m = std::max(1.0, 1.0 / (2.0 * min_exponent - 1.0));
  auto integrand = [&](double v) {
    const double zeta = start * std::pow(v, -m);
    const double f = profile(zeta);
    return f * f * m * start * std::pow(v, -m - 1.0);
  };
  return integrate_gauss(integrand, 0.0, 1.0, 4, tail_rule());
}

double norm(const TranslationState& f) {
  const double window = trapezoid(f.window().array().square(), f.step());
  double tail = 0.0;
  if (!f.tail().empty()) {
    tail = tail_square_integral([&](double z) { return f.tail_value(z); }, f.window_end(),
                                min_power_exponent(f.tail()));
  }
  return std::sqrt(window + tail);
}

TranslationSemigroup::TranslationSemigroup(double step, double window_length)
    : step_(step), window_length_(window_length) {
  if (!(step > 0.0) || !(window_length > 0.0))
    throw std::invalid_argument("translation semigroup: step and window must be positive");
  const long n = grid_steps(window_length, step);
  if (n < 1) throw std::invalid_argument("translation semigroup: window must be a multiple of the step");
  window_size_ = n + 1;
}

TranslationState apply_translation(const TranslationSemigroup& s, double t, const TranslationState& f) {
  if (t < 0.0) throw std::domain_error("apply_translation: negative time");
  if (!same_step(s.step(), f.step())) throw std::invalid_argument("apply_translation: grid mismatch");
  const long n = grid_steps(t, s.step());
  if (n < 0) throw std::invalid_argument("apply_translation: t is not a multiple of the step");
  if (n == 0) return f;
  Eigen::VectorXd window(f.window_size());
  for (Eigen::Index k = 0; k < window.size(); ++k) window(k) = f.value_at(k + n);
  auto tail = f.tail();
  for (auto& term : tail) term.offset += t;
  return TranslationState(f.step(), std::move(window), std::move(tail));
}

Kernel::Kernel(TranslationState profile) : profile_(std::move(profile)) {
  if ((profile_.window().array() < 0.0).any()) throw std::invalid_argument("kernel must be nonnegative");
  if (profile_.tail().size() > 1) throw std::invalid_argument("kernel tail must be a single term");
  for (const auto& t : profile_.tail())
    if (t.coeff < 0.0) throw std::invalid_argument("kernel tail must be nonnegative");
  cumulative_ = cumulative_trapezoid(profile_.window(), profile_.step());
}

Kernel Kernel::inverse_zeta(const TranslationSemigroup& s) {
  const long one = grid_steps(1.0, s.step());
  if (one < 1) throw std::invalid_argument("inverse_zeta kernel: 1 must be a grid point");
  if (s.window_size() <= one + 1) throw std::invalid_argument("inverse_zeta kernel: window must extend past 1");
  Eigen::VectorXd w(s.window_size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (k < one) w(k) = 0.0;
    else if (k == one) w(k) = 0.5;
    else w(k) = 1.0 / (s.step() * static_cast<double>(k));
  }
  return Kernel(TranslationState(s.step(), std::move(w), {{TailTerm::Kind::Power, 1.0, 0.0, 1.0}}));
}

Kernel Kernel::exponential(const TranslationSemigroup& s, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential kernel: rate must be positive");
  Eigen::VectorXd w(s.window_size());
  for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = std::exp(-rate * s.step() * static_cast<double>(k));
  return Kernel(TranslationState(s.step(), std::move(w), {{TailTerm::Kind::Exp, 1.0, 0.0, rate}}));
}

bool Kernel::integrable() const {
  for (const auto& t : profile_.tail())
    if (t.coeff > 0.0 && t.kind == TailTerm::Kind::Power && t.exponent <= 1.0) return false;
  return true;
}

double Kernel::antiderivative(double x) const {
  if (x < 0.0) throw std::domain_error("kernel antiderivative at negative argument");
  const double end = profile_.window_end();
  if (x <= end) {
    const double q = x / profile_.step();
    const auto k = static_cast<Eigen::Index>(std::floor(q));
    if (k + 1 >= cumulative_.size()) return cumulative_(cumulative_.size() - 1);
    const double frac = q - static_cast<double>(k);
    if (frac == 0.0) return cumulative_(k);
    // Exact for the trapezoid interpolant: integrate the linear segment piece.
    const double h = profile_.step();
    const double b0 = profile_.window()(k), b1 = profile_.window()(k + 1);
    const double s = frac * h;
    return cumulative_(k) + s * b0 + 0.5 * s * s * (b1 - b0) / h;
  }
  double acc = cumulative_(cumulative_.size() - 1);
  for (const auto& t : profile_.tail()) acc += term_integral(t, end, x);
  return acc;
}

TranslationState duhamel_translation(const TranslationSemigroup& s, const Kernel& b,
                                     const Signal& u, double t) {
  if (u.dim() != 1) throw std::invalid_argument("duhamel_translation: scalar input required");
  if (!same_step(u.dt(), s.step())) throw std::invalid_argument("duhamel_translation: dt must equal the spatial step");
  if (t < 0.0) throw std::domain_error("duhamel_translation: negative time");
  const long n = grid_steps(t, s.step());
  if (n < 0) throw std::invalid_argument("duhamel_translation: t is not grid-aligned");
  const Eigen::Index window = s.window_size();
  if (n == 0) return TranslationState::zero(s.step(), window);

  const double h = s.step();
  Eigen::VectorXd wu(n + 1);
  for (long j = 0; j <= n; ++j) wu(j) = (j == 0 || j == n ? 0.5 * h : h) * u.sample_scalar(j);
  Eigen::VectorXd bvals(window + n);
  for (Eigen::Index i = 0; i < bvals.size(); ++i) bvals(i) = b.value_at(i);

  Eigen::VectorXd values(window);
  for (Eigen::Index k = 0; k < window; ++k) {
    // reversed kernel segment b(ζ_k + t - s_j), j = 0..n
    values(k) = wu.dot(bvals.segment(k, n + 1).reverse());
  }
  std::vector<TailTerm> tail;
  for (const auto& term : b.profile().tail()) {
    for (long j = 0; j <= n; ++j) {
      if (wu(j) == 0.0) continue;
      TailTerm c = term;
      c.coeff *= wu(j);
      c.offset += h * static_cast<double>(n - j);
      tail.push_back(c);
    }
  }
  TranslationState out(s.step(), std::move(values), std::move(tail));
  out.compact();
  return out;
}

double growth_norm(const TranslationSemigroup& s, const Kernel& b, double tau) {
  if (tau < 0.0) throw std::domain_error("growth_norm: negative horizon");
  if (grid_steps(tau, s.step()) < 0) throw std::invalid_argument("growth_norm: tau is not grid-aligned");
  if (tau == 0.0) return 0.0;
  const Eigen::Index window = s.window_size();
  Eigen::VectorXd g(window);
  for (Eigen::Index k = 0; k < window; ++k) {
    const double zeta = s.step() * static_cast<double>(k);
    g(k) = b.antiderivative(zeta + tau) - b.antiderivative(zeta);
  }
  const double inner = trapezoid(g.array().square(), s.step());
  const double end = s.step() * static_cast<double>(window - 1);
  const auto& terms = b.profile().tail();
  double outer = 0.0;
  if (!terms.empty()) {
    auto profile = [&](double z) {
      double acc = 0.0;
      for (const auto& t : terms) acc += term_integral(t, z, z + tau);
      return acc;
    };
    outer = tail_square_integral(profile, end, min_power_exponent(terms));
  }
  return std::sqrt(inner + outer);
}

}  // namespace wiss
