#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "wbdg/basis.hpp"
#include "wbdg/euler.hpp"
#include "wbdg/mesh.hpp"

namespace wbdg {

/// Modal coefficients of a DG solution (or of a perturbation), laid out as
/// [cell][variable][mode] over interior cells.
template <int Dim>
class SolutionField {
 public:
  static constexpr int kVars = Dim + 2;

  SolutionField(Mesh<Dim> mesh, int degree, double time = 0.0)
      : mesh_(std::move(mesh)), degree_(degree), time_(time) {
    if (degree < 0) throw std::invalid_argument("SolutionField: negative degree");
    modes_ = Dim == 1 ? degree + 1 : (degree + 1) * (degree + 1);
    values_.assign(static_cast<std::size_t>(mesh_.interior_cells()) * kVars * modes_, 0.0);
  }

  const Mesh<Dim>& mesh() const { return mesh_; }
  int degree() const { return degree_; }
  int modes() const { return modes_; }
  int cells() const { return mesh_.interior_cells(); }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double& at(int cell, int var, int mode) { return values_[offset(cell, var, mode)]; }
  double at(int cell, int var, int mode) const { return values_[offset(cell, var, mode)]; }

  std::span<double> cell(int c) {
    return {values_.data() + static_cast<std::size_t>(c) * kVars * modes_, static_cast<std::size_t>(kVars * modes_)};
  }
  std::span<const double> cell(int c) const {
    return {values_.data() + static_cast<std::size_t>(c) * kVars * modes_, static_cast<std::size_t>(kVars * modes_)};
  }

  /// Cell average of each variable (mode 0 times psi_0^Dim).
  Conserved<Dim> average(int c) const {
    const double f = Dim == 1 ? std::sqrt(0.5) : 0.5;
    Conserved<Dim> u{};
    for (int v = 0; v < kVars; ++v) u[v] = at(c, v, 0) * f;
    return u;
  }

  bool same_shape(const SolutionField& o) const {
    return o.degree_ == degree_ && o.values_.size() == values_.size();
  }

 private:
  std::size_t offset(int cell, int var, int mode) const {
    return (static_cast<std::size_t>(cell) * kVars + var) * modes_ + mode;
  }

  Mesh<Dim> mesh_;
  int degree_;
  int modes_ = 0;
  double time_;
  std::vector<double> values_;
};

/// d/dt of every modal coefficient; same layout as SolutionField.
template <int Dim>
using Residual = SolutionField<Dim>;

/// Modal sum at a reference point of one cell.
template <int Dim>
Conserved<Dim> evaluate(const SolutionField<Dim>& field, int cell, const Point<Dim>& ref) {
  const Basis<Dim> basis(field.degree());
  const auto phi = basis.evaluate(ref);
  Conserved<Dim> u{};
  for (int v = 0; v < Dim + 2; ++v) {
    double s = 0.0;
    for (int m = 0; m < field.modes(); ++m) s += field.at(cell, v, m) * phi[m];
    u[v] = s;
  }
  return u;
}

/// Same, reusing precomputed basis values at the point.
template <int Dim>
Conserved<Dim> evaluate(const SolutionField<Dim>& field, int cell, std::span<const double> phi) {
  Conserved<Dim> u{};
  const auto c = field.cell(cell);
  const int nm = field.modes();
  for (int v = 0; v < Dim + 2; ++v) {
    double s = 0.0;
    for (int m = 0; m < nm; ++m) s += c[v * nm + m] * phi[m];
    u[v] = s;
  }
  return u;
}

/// L2 projection onto the DG space with the (Np+1)^Dim Gauss rule:
/// coeff_m = sum_q u(x_q) phi_m(x_q) w_q, exact for the orthonormal basis.
/// `pointwise` returns the conserved state to project at a physical point.
template <int Dim>
SolutionField<Dim> project_conserved(const std::function<Conserved<Dim>(const Point<Dim>&)>& pointwise,
                                     const Mesh<Dim>& mesh, const Basis<Dim>& basis) {
  SolutionField<Dim> field(mesh, basis.degree());
  const int nq = basis.volume_points();
  const int nm = basis.modes();
  const double* phi = basis.phi();
  const auto& w = basis.volume_weights();
  for (int c = 0; c < mesh.interior_cells(); ++c) {
    const auto idx = mesh.unravel(c);
    auto coeffs = field.cell(c);
    for (int q = 0; q < nq; ++q) {
      const auto x = mesh.map_to_physical(idx, basis.volume_node(q));
      Conserved<Dim> u;
      try {
        u = pointwise(x);
      } catch (const AdmissibilityError& e) {
        throw AdmissibilityError("projection in cell " + std::to_string(c) + ": " + e.what());
      }
      for (int v = 0; v < Dim + 2; ++v) {
        for (int m = 0; m < nm; ++m) coeffs[v * nm + m] += u[v] * phi[q * nm + m] * w[q];
      }
    }
  }
  return field;
}

/// Projection of a primitive-state initial condition.
template <int Dim>
SolutionField<Dim> project(const std::function<Primitive<Dim>(const Point<Dim>&)>& initial, double gamma,
                           const Mesh<Dim>& mesh, const Basis<Dim>& basis) {
  return project_conserved<Dim>([&](const Point<Dim>& x) { return to_conserved<Dim>(initial(x), gamma); }, mesh,
                                basis);
}

}  // namespace wbdg
