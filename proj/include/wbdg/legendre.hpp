#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace wbdg {

/// Values and first derivatives of the orthonormal Legendre polynomials
/// psi_0..psi_degree at one point, with int_{-1}^{1} psi_i psi_j = delta_ij.
struct LegendreSample {
  std::vector<double> values;
  std::vector<double> derivatives;
};

inline LegendreSample legendre_eval(int degree, double point) {
  if (degree < 0) throw std::invalid_argument("legendre_eval: negative degree");
  if (!(point >= -1.0 && point <= 1.0)) {
    throw std::domain_error("legendre_eval: point outside [-1, 1]");
  }
  LegendreSample s;
  s.values.assign(degree + 1, 0.0);
  s.derivatives.assign(degree + 1, 0.0);
  // P_n by recurrence; P_n' from P_n' = P_{n-2}' + (2n-1) P_{n-1}, valid at the endpoints.
  s.values[0] = 1.0;
  if (degree >= 1) {
    s.values[1] = point;
    s.derivatives[1] = 1.0;
  }
  for (int n = 2; n <= degree; ++n) {
    s.values[n] = ((2.0 * n - 1.0) * point * s.values[n - 1] - (n - 1.0) * s.values[n - 2]) / n;
    s.derivatives[n] = s.derivatives[n - 2] + (2.0 * n - 1.0) * s.values[n - 1];
  }
  for (int n = 0; n <= degree; ++n) {
    const double scale = std::sqrt((2.0 * n + 1.0) / 2.0);
    s.values[n] *= scale;
    s.derivatives[n] *= scale;
  }
  return s;
}

}  // namespace wbdg
