#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace wbdg {

/// Gauss-Legendre rule on [-1, 1]. Nodes are sorted ascending.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }
  /// Highest polynomial degree integrated exactly.
  int exactness() const { return 2 * size() - 1; }
};

namespace detail {

// Standard (unnormalized) Legendre P_n and P_n' by the three-term recurrence.
inline void legendre_standard(int n, double x, double& p, double& dp) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  // Derivative from P_{n-1} and P_n; only used away from x = +-1.
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace detail

/// Nodes by Newton iteration on P_n from Chebyshev initial guesses.
inline Quadrature gauss_legendre(int point_count) {
  if (point_count < 1) {
    throw std::invalid_argument("gauss_legendre: point_count must be >= 1");
  }
  const int n = point_count;
  Quadrature rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0.0;
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      detail::legendre_standard(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    detail::legendre_standard(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // x is the i-th largest root; mirror for the negative half.
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[n - 1 - i] = w;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace wbdg
