#include "wiss/signals.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wiss/detail/overloaded.hpp"
#include "wiss/quadrature.hpp"

namespace wiss {
namespace {

using detail::overloaded;

bool tail_is_zero(const Tail& tail) {
  return std::visit(overloaded{[](const ZeroTail&) { return true; },
                               [](const ExpTail& t) { return t.coeff == 0.0; },
                               [](const PowerTail& t) { return t.coeff == 0.0; },
                               [](const ConstantTail& t) { return t.value == 0.0; }},
                    tail);
}

Tail reindexed(const Tail& tail, double offset) {
  return std::visit(overloaded{[](const ZeroTail& t) -> Tail { return t; },
                               [&](ExpTail t) -> Tail {
                                 t.origin += offset;
                                 return t;
                               },
                               [&](PowerTail t) -> Tail {
                                 t.origin += offset;
                                 return t;
                               },
                               [](const ConstantTail& t) -> Tail { return t; }},
                    tail);
}

// ∫_{start}^{∞} |profile(t)|^p dt
double tail_integral(const Tail& tail, double start, double p) {
  return std::visit(
      overloaded{[](const ZeroTail&) { return 0.0; },
                 [&](const ExpTail& t) {
                   if (t.coeff == 0.0) return 0.0;
                   return std::pow(std::abs(t.coeff), p) *
                          std::exp(-p * t.rate * (start - t.origin)) / (p * t.rate);
                 },
                 [&](const PowerTail& t) {
                   if (t.coeff == 0.0) return 0.0;
                   const double e = p * t.exponent;
                   if (e <= 1.0) return kInfinity;
                   return std::pow(std::abs(t.coeff), p) * std::pow(start - t.origin, 1.0 - e) /
                          (e - 1.0);
                 },
                 [](const ConstantTail& t) { return t.value == 0.0 ? 0.0 : kInfinity; }},
      tail);
}

double tail_sup(const Tail& tail, double start) {
  return std::visit(
      overloaded{[](const ZeroTail&) { return 0.0; },
                 [&](const ExpTail& t) {
                   return std::abs(t.coeff) * std::exp(-t.rate * (start - t.origin));
                 },
                 [&](const PowerTail& t) {
                   return std::abs(t.coeff) * std::pow(start - t.origin, -t.exponent);
                 },
                 [](const ConstantTail& t) { return std::abs(t.value); }},
      tail);
}

long require_steps(double tau, double dt, const char* what) {
  if (tau < 0.0) throw std::invalid_argument(std::string(what) + ": negative time");
  const long n = grid_steps(tau, dt);
  if (n < 0) throw std::invalid_argument(std::string(what) + ": time is not a multiple of dt");
  return n;
}

}  // namespace

double tail_profile(const Tail& tail, double t) {
  return std::visit(
      overloaded{[](const ZeroTail&) { return 0.0; },
                 [&](const ExpTail& x) { return x.coeff * std::exp(-x.rate * (t - x.origin)); },
                 [&](const PowerTail& x) { return x.coeff * std::pow(t - x.origin, -x.exponent); },
                 [](const ConstantTail& x) { return x.value; }},
      tail);
}

Signal::Signal(double dt, Eigen::MatrixXd values, Tail tail, Eigen::VectorXd direction)
    : dt_(dt), values_(std::move(values)), tail_(tail), direction_(std::move(direction)) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw std::invalid_argument("Signal: dt must be positive");
  if (values_.rows() < 1 || values_.cols() < 1)
    throw std::invalid_argument("Signal: window needs at least one sample of dimension >= 1");
  if (!values_.allFinite()) throw std::invalid_argument("Signal: window values must be finite");
  if (direction_.size() == 0) {
    direction_ = Eigen::VectorXd::Zero(values_.rows());
    direction_(0) = 1.0;
  }
  if (direction_.size() != values_.rows())
    throw std::invalid_argument("Signal: tail direction has wrong dimension");
  std::visit(overloaded{[](const ZeroTail&) {},
                        [](const ExpTail& t) {
                          if (!(t.rate > 0.0)) throw std::invalid_argument("ExpTail: rate must be positive");
                        },
                        [this](const PowerTail& t) {
                          if (!(t.exponent > 0.0))
                            throw std::invalid_argument("PowerTail: exponent must be positive");
                          if (!(t.origin < window_end()))
                            throw std::invalid_argument("PowerTail: origin must precede the window end");
                        },
                        [](const ConstantTail&) {}},
             tail_);
}

Signal Signal::zero(double dt, Eigen::Index dim) {
  return Signal(dt, Eigen::MatrixXd::Zero(dim, 1));
}

Signal Signal::scalar(double dt, const Eigen::VectorXd& values, Tail tail) {
  return Signal(dt, values.transpose(), tail);
}

Eigen::VectorXd Signal::sample(Eigen::Index k) const {
  if (k < values_.cols()) return values_.col(k);
  return tail_profile(tail_, dt_ * static_cast<double>(k)) * direction_;
}

double Signal::sample_scalar(Eigen::Index k) const {
  if (k < values_.cols()) return values_(0, k);
  return tail_profile(tail_, dt_ * static_cast<double>(k)) * direction_(0);
}

double Signal::magnitude(Eigen::Index k) const {
  if (k < values_.cols()) return values_.col(k).norm();
  return std::abs(tail_profile(tail_, dt_ * static_cast<double>(k))) * direction_.norm();
}

Eigen::VectorXd Signal::at(double t) const {
  if (t < 0.0) throw std::domain_error("Signal evaluated at negative time");
  if (t > window_end()) return tail_profile(tail_, t) * direction_;
  const double q = t / dt_;
  const auto k = static_cast<Eigen::Index>(std::floor(q));
  const double frac = q - static_cast<double>(k);
  if (k + 1 >= values_.cols() || frac == 0.0) return values_.col(std::min(k, values_.cols() - 1));
  return (1.0 - frac) * values_.col(k) + frac * values_.col(k + 1);
}

bool Signal::is_zero() const { return values_.isZero(0.0) && tail_is_zero(tail_); }

double lp_norm(const Signal& u, double p) {
  if (!(p >= 1.0)) throw std::domain_error("lp_norm: p must be >= 1");
  const Eigen::VectorXd mags = u.window().colwise().norm().transpose();
  const double dnorm = u.direction().norm();
  if (std::isinf(p)) return std::max(mags.maxCoeff(), dnorm * tail_sup(u.tail(), u.window_end()));
  const double window = trapezoid(mags.array().pow(p), u.dt());
  const double tail = std::pow(dnorm, p) * tail_integral(u.tail(), u.window_end(), p);
  return std::pow(window + tail, 1.0 / p);
}

Signal shift(const Signal& u, double tau) {
  const long n = require_steps(tau, u.dt(), "shift");
  if (n == 0) return u;
  const Tail tail = reindexed(u.tail(), -u.dt() * static_cast<double>(n));
  if (n < u.window_size()) {
    return Signal(u.dt(), u.window().rightCols(u.window_size() - n), tail, u.direction());
  }
  Eigen::MatrixXd head = u.sample(n);
  return Signal(u.dt(), std::move(head), tail, u.direction());
}

Signal concat(const Signal& u1, const Signal& u2, double tau) {
  if (std::abs(u1.dt() - u2.dt()) > 1e-15 * u1.dt())
    throw std::invalid_argument("concat: signals have different grid steps");
  if (u1.dim() != u2.dim()) throw std::invalid_argument("concat: signals have different dimensions");
  const long n = require_steps(tau, u1.dt(), "concat");
  if (n == 0) return u2;
  Eigen::MatrixXd values(u1.dim(), n + u2.window_size());
  for (long k = 0; k < n; ++k) values.col(k) = u1.sample(k);
  values.rightCols(u2.window_size()) = u2.window();
  return Signal(u1.dt(), std::move(values), reindexed(u2.tail(), tau), u2.direction());
}

void InputSpaceSpec::validate() const {
  if (!(p >= 1.0)) throw std::invalid_argument("input space: p must be >= 1");
  std::visit(overloaded{[](const FullLp&) {},
                        [](const AlphaDivergent& a) {
                          if (!(a.q > 0.0)) throw std::invalid_argument("input space: q must be positive");
                        },
                        [](const EventuallyExpDecaying&) {},
                        [this](const LInfty0&) {
                          if (!std::isinf(p)) throw std::invalid_argument("input space: L^inf_0 requires p = inf");
                        }},
             constraint);
}

bool admits(const InputSpaceSpec& space, const Signal& u) {
  space.validate();
  if (!std::isfinite(lp_norm(u, space.p))) return false;
  const Tail& tail = u.tail();
  return std::visit(
      overloaded{
          [](const FullLp&) { return true; },
          [&](const AlphaDivergent& a) {
            if (u.direction().norm() == 0.0) return false;
            if (const auto* c = std::get_if<ConstantTail>(&tail)) return c->value != 0.0;
            if (const auto* pw = std::get_if<PowerTail>(&tail))
              return pw->coeff != 0.0 && a.q * pw->exponent <= 1.0;
            return false;
          },
          [&](const EventuallyExpDecaying&) {
            return std::holds_alternative<ZeroTail>(tail) || std::holds_alternative<ExpTail>(tail) ||
                   tail_is_zero(tail);
          },
          [&](const LInfty0&) { return !std::holds_alternative<ConstantTail>(tail) || tail_is_zero(tail); }},
      space.constraint);
}

double alpha_divergence_exponent(double p, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("alpha-divergent family: q must be positive");
  if (!(q < p)) throw std::invalid_argument("alpha-divergent family: need q < p for a certified tail");
  return 0.5 * (1.0 / p + 1.0 / q);
}

Signal make_alpha_divergent(double p, double q, double amplitude, double dt) {
  if (!(amplitude > 0.0)) throw std::invalid_argument("alpha-divergent family: amplitude must be positive");
  if (!(q > 0.0)) throw std::invalid_argument("alpha-divergent family: q must be positive");
  const long n = grid_steps(1.0, dt);
  if (n < 1) throw std::invalid_argument("alpha-divergent family: 1 must be a multiple of dt");
  Eigen::VectorXd window(n + 1);
  if (std::isinf(p)) {
    window.setConstant(amplitude);
    return Signal::scalar(dt, window, ConstantTail{amplitude});
  }
  const double e = alpha_divergence_exponent(p, q);
  for (long k = 0; k <= n; ++k) window(k) = amplitude * static_cast<double>(k) / static_cast<double>(n);
  return Signal::scalar(dt, window, PowerTail{amplitude, e, 0.0});
}

Signal make_eventually_exp_decaying(double dt, const Eigen::MatrixXd& window, double coeff,
                                    double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("eventually exponentially decaying: rate must be positive");
  if (!(coeff >= 0.0)) throw std::invalid_argument("eventually exponentially decaying: coeff must be >= 0");
  const double end = dt * static_cast<double>(window.cols() - 1);
  Eigen::VectorXd direction = Eigen::VectorXd::Zero(window.rows());
  direction(0) = 1.0;
  return Signal(dt, window, ExpTail{coeff, rate, end}, direction);
}

void write_csv(std::ostream& os, const Signal& u) {
  os << "# signal dt=" << format_double(u.dt()) << " m=" << u.dim() << " tail=";
  std::visit(overloaded{[&](const ZeroTail&) { os << "zero"; },
                        [&](const ExpTail& t) {
                          os << "exp coeff=" << format_double(t.coeff) << " rate=" << format_double(t.rate)
                             << " origin=" << format_double(t.origin);
                        },
                        [&](const PowerTail& t) {
                          os << "power coeff=" << format_double(t.coeff)
                             << " exponent=" << format_double(t.exponent)
                             << " origin=" << format_double(t.origin);
                        },
                        [&](const ConstantTail& t) { os << "constant value=" << format_double(t.value); }},
             u.tail());
  os << " direction=";
  for (Eigen::Index i = 0; i < u.dim(); ++i) os << (i ? ";" : "") << format_double(u.direction()(i));
  os << "\nt";
  for (Eigen::Index i = 0; i < u.dim(); ++i) os << ",u_" << (i + 1);
  os << '\n';
  for (Eigen::Index k = 0; k < u.window_size(); ++k) {
    os << format_double(u.dt() * static_cast<double>(k));
    for (Eigen::Index i = 0; i < u.dim(); ++i) os << ',' << format_double(u.window()(i, k));
    os << '\n';
  }
}

Signal read_signal_csv(std::istream& is) {
  std::string line;
  std::getline(is, line);
  std::istringstream hdr(line);
  std::string hash, tag, token;
  hdr >> hash >> tag;
  if (hash != "#" || tag != "signal") throw std::invalid_argument("expected '# signal' header");
  std::map<std::string, std::string> f;
  while (hdr >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("malformed signal header field: " + token);
    f[token.substr(0, eq)] = token.substr(eq + 1);
  }
  const double dt = std::stod(f.at("dt"));
  const auto m = static_cast<Eigen::Index>(std::stol(f.at("m")));
  Tail tail = ZeroTail{};
  const std::string kind = f.at("tail");
  if (kind == "exp") tail = ExpTail{std::stod(f.at("coeff")), std::stod(f.at("rate")), std::stod(f.at("origin"))};
  else if (kind == "power")
    tail = PowerTail{std::stod(f.at("coeff")), std::stod(f.at("exponent")), std::stod(f.at("origin"))};
  else if (kind == "constant") tail = ConstantTail{std::stod(f.at("value"))};
  else if (kind != "zero") throw std::invalid_argument("unknown tail kind: " + kind);
  Eigen::VectorXd direction(m);
  {
    std::istringstream ds(f.at("direction"));
    std::string part;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!std::getline(ds, part, ';')) throw std::invalid_argument("direction has too few entries");
      direction(i) = std::stod(part);
    }
  }
  std::getline(is, line);  // column header
  std::vector<std::vector<double>> cols;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');  // t
    std::vector<double> col;
    while (std::getline(row, cell, ',')) col.push_back(std::stod(cell));
    if (static_cast<Eigen::Index>(col.size()) != m) throw std::invalid_argument("signal row has wrong width");
    cols.push_back(std::move(col));
  }
  Eigen::MatrixXd values(m, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k)
    for (Eigen::Index i = 0; i < m; ++i) values(i, static_cast<Eigen::Index>(k)) = cols[k][i];
  return Signal(dt, std::move(values), tail, direction);
}

}  // namespace wiss
