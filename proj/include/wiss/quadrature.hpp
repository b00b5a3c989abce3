#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include <Eigen/Dense>

namespace wiss {

/// Composite trapezoid rule for samples on a uniform grid of step h.
template <typename Derived>
typename Derived::Scalar trapezoid(const Eigen::DenseBase<Derived>& f,
                                   typename Derived::Scalar h) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = f.size();
  if (n < 2) return Scalar(0);
  Scalar acc = (f(0) + f(n - 1)) / Scalar(2);
  for (Eigen::Index k = 1; k + 1 < n; ++k) acc += f(k);
  return h * acc;
}

/// Running trapezoid integral; entry k holds the integral over [0, k h].
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> cumulative_trapezoid(
    const Eigen::DenseBase<Derived>& f, typename Derived::Scalar h) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(f.size());
  if (f.size() == 0) return out;
  out(0) = Scalar(0);
  for (Eigen::Index k = 1; k < f.size(); ++k)
    out(k) = out(k - 1) + h * (f(k - 1) + f(k)) / Scalar(2);
  return out;
}

template <typename Scalar = double>
struct GaussLegendreRule {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;    // on [-1, 1]
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
};

/// Gauss-Legendre nodes and weights from the symmetric Jacobi matrix (Golub-Welsch).
template <typename Scalar = double>
GaussLegendreRule<Scalar> gauss_legendre(int n) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat jacobi = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const Scalar kk = Scalar(k);
    const Scalar b = kk / std::sqrt(Scalar(4) * kk * kk - Scalar(1));
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(jacobi);
  GaussLegendreRule<Scalar> rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = Scalar(2) * solver.eigenvectors().row(0).transpose().array().square();
  return rule;
}

/// Composite Gauss-Legendre quadrature of f over [a, b] with equal panels.
template <typename F, typename Scalar = double>
Scalar integrate_gauss(const F& f, Scalar a, Scalar b, int panels,
                       const GaussLegendreRule<Scalar>& rule) {
  const Scalar width = (b - a) / Scalar(panels);
  Scalar total(0);
  for (int p = 0; p < panels; ++p) {
    const Scalar mid = a + (Scalar(p) + Scalar(0.5)) * width;
    Scalar panel(0);
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
      panel += rule.weights(i) * f(mid + rule.nodes(i) * width / Scalar(2));
    total += panel * width / Scalar(2);
  }
  return total;
}

/// Shortest round-trip text form of a double; used by every CSV writer.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Integer number of grid steps in `t`; returns -1 when `t` is not grid-aligned.
inline long grid_steps(double t, double step) {
  const double q = t / step;
  const double n = std::round(q);
  if (std::abs(q - n) > 1e-9 * std::max(1.0, std::abs(q))) return -1;
  return static_cast<long>(n);
}

}  // namespace wiss
