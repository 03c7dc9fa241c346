#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wbdg/legendre.hpp"
#include "wbdg/mesh.hpp"
#include "wbdg/quadrature.hpp"

namespace wbdg {

/// Tensor-product (Q-type) modal basis of degree Np per axis, tabulated on
/// the (Np+1)-point Gauss-Legendre rule.
///
/// Mode index m = i*(Np+1) + j for psi_i(x) psi_j(y); volume point index
/// q = a*(Np+1) + b for (xi_a, eta_b). In 1D m = i and q = a.
template <int Dim>
class Basis {
 public:
  explicit Basis(int degree) : degree_(degree), rule_(gauss_legendre(degree + 1)) {
    if (degree < 0) throw std::invalid_argument("Basis: negative degree");
    const int n = degree + 1;
    psi_.assign(n * n, 0.0);
    dpsi_.assign(n * n, 0.0);
    for (int a = 0; a < n; ++a) {
      const auto s = legendre_eval(degree, rule_.nodes[a]);
      for (int i = 0; i < n; ++i) {
        psi_[a * n + i] = s.values[i];
        dpsi_[a * n + i] = s.derivatives[i];
      }
    }
    const auto lo = legendre_eval(degree, -1.0);
    const auto hi = legendre_eval(degree, 1.0);
    edge_[0] = lo.values;
    edge_[1] = hi.values;

    const int nm = modes();
    const int nq = volume_points();
    vol_phi_.assign(nq * nm, 0.0);
    vol_grad_.assign(Dim, std::vector<double>(nq * nm, 0.0));
    vol_weight_.assign(nq, 0.0);
    for (int q = 0; q < nq; ++q) {
      const auto pa = point_axes(q);
      double w = 1.0;
      for (int d = 0; d < Dim; ++d) w *= rule_.weights[pa[d]];
      vol_weight_[q] = w;
      for (int m = 0; m < nm; ++m) {
        const auto ma = mode_axes(m);
        double v = 1.0;
        for (int d = 0; d < Dim; ++d) v *= psi_[pa[d] * n + ma[d]];
        vol_phi_[q * nm + m] = v;
        for (int g = 0; g < Dim; ++g) {
          double dv = 1.0;
          for (int d = 0; d < Dim; ++d) {
            dv *= (d == g) ? dpsi_[pa[d] * n + ma[d]] : psi_[pa[d] * n + ma[d]];
          }
          vol_grad_[g][q * nm + m] = dv;
        }
      }
    }
    // Face tables: face_phi_[axis][side][p*nm + m], p runs over face points.
    const int nf = face_points();
    for (int axis = 0; axis < Dim; ++axis) {
      for (int side = 0; side < 2; ++side) {
        auto& t = face_phi_[axis][side];
        t.assign(nf * nm, 0.0);
        for (int p = 0; p < nf; ++p) {
          for (int m = 0; m < nm; ++m) {
            const auto ma = mode_axes(m);
            double v = edge_[side][ma[axis]];
            if constexpr (Dim == 2) {
              const int other = 1 - axis;
              v *= psi_[p * n + ma[other]];
            }
            t[p * nm + m] = v;
          }
        }
      }
    }
    face_weight_.assign(nf, 1.0);
    if constexpr (Dim == 2) {
      for (int p = 0; p < nf; ++p) face_weight_[p] = rule_.weights[p];
    }
  }

  int degree() const { return degree_; }
  int points_per_axis() const { return degree_ + 1; }
  int modes() const { return ipow(degree_ + 1); }
  int volume_points() const { return ipow(degree_ + 1); }
  int face_points() const { return Dim == 1 ? 1 : degree_ + 1; }
  const Quadrature& rule() const { return rule_; }

  std::array<int, Dim> mode_axes(int m) const { return split(m); }
  std::array<int, Dim> point_axes(int q) const { return split(q); }

  /// Reference coordinates of volume point q.
  Point<Dim> volume_node(int q) const {
    const auto pa = point_axes(q);
    Point<Dim> r{};
    for (int d = 0; d < Dim; ++d) r[d] = rule_.nodes[pa[d]];
    return r;
  }

  /// Reference coordinates of face point p on the face normal to axis, side 0 = -1, side 1 = +1.
  Point<Dim> face_node(int axis, int side, int p) const {
    Point<Dim> r{};
    r[axis] = side == 0 ? -1.0 : 1.0;
    if constexpr (Dim == 2) r[1 - axis] = rule_.nodes[p];
    return r;
  }

  const double* phi() const { return vol_phi_.data(); }
  const double* grad(int axis) const { return vol_grad_[axis].data(); }
  const std::vector<double>& volume_weights() const { return vol_weight_; }
  const double* face_phi(int axis, int side) const { return face_phi_[axis][side].data(); }
  const std::vector<double>& face_weights() const { return face_weight_; }

  /// Basis values at an arbitrary reference point.
  std::vector<double> evaluate(const Point<Dim>& ref) const {
    std::array<LegendreSample, Dim> s;
    for (int d = 0; d < Dim; ++d) s[d] = legendre_eval(degree_, ref[d]);
    std::vector<double> out(modes());
    for (int m = 0; m < modes(); ++m) {
      const auto ma = mode_axes(m);
      double v = 1.0;
      for (int d = 0; d < Dim; ++d) v *= s[d].values[ma[d]];
      out[m] = v;
    }
    return out;
  }

  /// psi_0^Dim: the factor turning mode-0 coefficients into cell averages.
  double average_factor() const { return Dim == 1 ? std::sqrt(0.5) : 0.5; }

 private:
  int ipow(int n) const { return Dim == 1 ? n : n * n; }

  std::array<int, Dim> split(int k) const {
    if constexpr (Dim == 1) {
      return {k};
    } else {
      const int n = degree_ + 1;
      return {k / n, k % n};
    }
  }

  int degree_;
  Quadrature rule_;
  std::vector<double> psi_, dpsi_;  // [a*n + i]
  std::array<std::vector<double>, 2> edge_;
  std::vector<double> vol_phi_;
  std::vector<std::vector<double>> vol_grad_;
  std::vector<double> vol_weight_;
  std::array<std::array<std::vector<double>, 2>, Dim> face_phi_;
  std::vector<double> face_weight_;
};

}  // namespace wbdg
