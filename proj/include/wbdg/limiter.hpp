#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbdg/basis.hpp"
#include "wbdg/euler.hpp"
#include "wbdg/field.hpp"
#include "wbdg/well_balanced.hpp"

namespace wbdg {

struct LimiterConfig {
  bool enabled = false;
  double floor = 1e-13;
  double bisection_tol = 1e-12;
};

/// Outcome of limiting one cell.
struct LimitResult {
  double theta_density = 1.0;
  double theta_pressure = 1.0;
  bool modified() const { return theta_density < 1.0 || theta_pressure < 1.0; }
};

/// Scaling limiter of Zhang-Shu type. Each cell polynomial is pulled towards
/// an anchor, u_theta(x) = A(x) + theta (u(x) - A(x)) with A(x) the cell mean
/// (classical) or w_eq(x) + mean(delta) (delta formulation), with one theta
/// for density and then one for pressure. Only modes above 0 are scaled.
///
/// Check points: all volume quadrature points plus all face trace points.
template <int Dim>
class PositivityLimiter {
 public:
  static constexpr int kVars = Dim + 2;

  PositivityLimiter(const Basis<Dim>& basis, double gamma, LimiterConfig config = {})
      : gamma_(gamma), cfg_(config), modes_(basis.modes()) {
    if (!(cfg_.floor > 0.0)) throw std::invalid_argument("limiter floor must be positive");
    const int nm = modes_;
    for (int q = 0; q < basis.volume_points(); ++q) {
      points_.insert(points_.end(), basis.phi() + q * nm, basis.phi() + (q + 1) * nm);
    }
    for (int axis = 0; axis < Dim; ++axis) {
      for (int side = 0; side < 2; ++side) {
        const double* fp = basis.face_phi(axis, side);
        for (int p = 0; p < basis.face_points(); ++p) points_.insert(points_.end(), fp + p * nm, fp + (p + 1) * nm);
      }
    }
    npts_ = static_cast<int>(points_.size()) / nm;
  }

  const LimiterConfig& config() const { return cfg_; }
  int check_points() const { return npts_; }

  /// Classical limiter on one cell of a full-state field.
  LimitResult limit_cell(SolutionField<Dim>& field, int cell) const {
    std::vector<Conserved<Dim>> anchor(npts_, field.average(cell));
    return limit_block(field.cell(cell), anchor, "cell " + std::to_string(cell));
  }

  /// Delta-formulation limiter: `eq` holds w_eq at the check points of this cell.
  LimitResult limit_cell(SolutionField<Dim>& delta, int cell, const std::vector<Conserved<Dim>>& eq) const {
    const auto mean = delta.average(cell);
    std::vector<Conserved<Dim>> anchor(eq);
    for (auto& a : anchor)
      for (int v = 0; v < kVars; ++v) a[v] += mean[v];
    return limit_block(delta.cell(cell), anchor, "cell " + std::to_string(cell), &eq);
  }

  /// Limits every cell; returns the number of cells modified.
  int apply(SolutionField<Dim>& field) const {
    int changed = 0;
    for (int c = 0; c < field.cells(); ++c) changed += limit_cell(field, c).modified() ? 1 : 0;
    return changed;
  }

  /// w_eq at this limiter's check points, in check-point order, for one cell.
  std::vector<Conserved<Dim>> equilibrium_samples(const EquilibriumCache<Dim>& cache, const FaceTopology<Dim>& topo,
                                                  const Mesh<Dim>& mesh, int cell, int volume_points,
                                                  int face_points) const {
    std::vector<Conserved<Dim>> eq;
    eq.reserve(npts_);
    VolumeSample<Dim> vs;
    for (int q = 0; q < volume_points; ++q) {
      cache.volume(cell, q, vs);
      eq.push_back(vs.u);
    }
    const auto idx = mesh.unravel(cell);
    FaceSample<Dim> fs;
    for (int axis = 0; axis < Dim; ++axis) {
      for (int side = 0; side < 2; ++side) {
        const int id = topo.face_of(axis, idx, side);
        for (int p = 0; p < face_points; ++p) {
          cache.face(axis, id, p, fs);
          eq.push_back(fs.u);
        }
      }
    }
    return eq;
  }

 private:
  Conserved<Dim> sample(std::span<const double> coef, int k) const {
    const double* phi = points_.data() + static_cast<std::size_t>(k) * modes_;
    Conserved<Dim> u{};
    for (int v = 0; v < kVars; ++v) {
      double s = 0.0;
      for (int m = 0; m < modes_; ++m) s += coef[v * modes_ + m] * phi[m];
      u[v] = s;
    }
    return u;
  }

  double pressure(const Conserved<Dim>& u) const {
    double kinetic = 0.0;
    for (int d = 0; d < Dim; ++d) kinetic += u[1 + d] * u[1 + d];
    return (gamma_ - 1.0) * (u[Dim + 1] - 0.5 * kinetic / u[0]);
  }

  /// Point state for a given theta: anchor + theta (u - anchor).
  static Conserved<Dim> blend(const Conserved<Dim>& a, const Conserved<Dim>& u, double theta) {
    Conserved<Dim> r;
    for (int v = 0; v < kVars; ++v) r[v] = a[v] + theta * (u[v] - a[v]);
    return r;
  }

  /// Full states (anchor-shifted) at every check point.
  std::vector<Conserved<Dim>> states(std::span<const double> coef, const std::vector<Conserved<Dim>>* eq) const {
    std::vector<Conserved<Dim>> u(npts_);
    for (int k = 0; k < npts_; ++k) {
      u[k] = sample(coef, k);
      if (eq)
        for (int v = 0; v < kVars; ++v) u[k][v] += (*eq)[k][v];
    }
    return u;
  }

  void scale(std::span<double> coef, int var_lo, int var_hi, double theta) const {
    for (int v = var_lo; v < var_hi; ++v)
      for (int m = 1; m < modes_; ++m) coef[v * modes_ + m] *= theta;
  }

  bool admissible(const std::vector<Conserved<Dim>>& u) const {
    for (const auto& s : u)
      if (!(s[0] >= cfg_.floor) || !(pressure(s) >= cfg_.floor)) return false;
    return true;
  }

  LimitResult limit_block(std::span<double> coef, const std::vector<Conserved<Dim>>& anchor, const std::string& where,
                          const std::vector<Conserved<Dim>>* eq = nullptr) const {
    const double eps = cfg_.floor;
    for (const auto& a : anchor) {
      if (!(a[0] > eps) || !(pressure(a) > eps)) {
        throw AdmissibilityError("limiter: inadmissible anchor state in " + where + ": " + describe<Dim>(a));
      }
    }
    LimitResult out;
    auto u = states(coef, eq);
    if (admissible(u)) return out;

    // Density: linear in theta.
    double theta = 1.0;
    for (int k = 0; k < npts_; ++k) {
      if (u[k][0] < eps) theta = std::min(theta, (anchor[k][0] - eps) / (anchor[k][0] - u[k][0]));
    }
    theta = std::clamp(theta, 0.0, 1.0);
    if (theta < 1.0) {
      scale(coef, 0, 1, theta);
      out.theta_density = theta;
      u = states(coef, eq);
    }

    // Pressure: concave in theta along the segment; bisect each offending point.
    theta = 1.0;
    for (int k = 0; k < npts_; ++k) {
      if (pressure(u[k]) >= eps && u[k][0] >= eps) continue;
      double lo = 0.0, hi = 1.0;
      while (hi - lo > cfg_.bisection_tol) {
        const double mid = 0.5 * (lo + hi);
        const auto s = blend(anchor[k], u[k], mid);
        if (s[0] >= eps && pressure(s) >= eps) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      theta = std::min(theta, lo);
    }
    // Rounding in the coefficient products can leave a point a hair below
    // the floor; shrink until every check point passes.
    auto trial = std::vector<double>(coef.begin(), coef.end());
    for (int attempt = 0; attempt < 60; ++attempt) {
      std::copy(coef.begin(), coef.end(), trial.begin());
      scale(trial, 0, kVars, theta);
      if (admissible(states(trial, eq))) break;
      theta = std::max(theta - 1e-12 * std::ldexp(1.0, attempt), 0.0);
    }
    std::copy(trial.begin(), trial.end(), coef.begin());
    out.theta_pressure = theta;
    return out;
  }

  double gamma_;
  LimiterConfig cfg_;
  int modes_;
  int npts_ = 0;
  std::vector<double> points_;
};

/// Delta-formulation limiter over every cell, with w_eq samples prebuilt.
template <int Dim>
class WellBalancedLimiter {
 public:
  WellBalancedLimiter(const DgOperator<Dim>& op, const EquilibriumCache<Dim>& cache, LimiterConfig config = {})
      : limiter_(op.basis(), op.gamma(), config) {
    const int nc = op.mesh().interior_cells();
    eq_.reserve(nc);
    for (int c = 0; c < nc; ++c) {
      eq_.push_back(limiter_.equilibrium_samples(cache, op.topology(), op.mesh(), c, op.basis().volume_points(),
                                                 op.basis().face_points()));
    }
  }

  int apply(SolutionField<Dim>& delta) const {
    int changed = 0;
    for (int c = 0; c < delta.cells(); ++c) changed += limiter_.limit_cell(delta, c, eq_[c]).modified() ? 1 : 0;
    return changed;
  }

  const PositivityLimiter<Dim>& limiter() const { return limiter_; }

 private:
  PositivityLimiter<Dim> limiter_;
  std::vector<std::vector<Conserved<Dim>>> eq_;
};

}  // namespace wbdg
