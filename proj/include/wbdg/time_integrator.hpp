#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbdg/equilibria.hpp"
#include "wbdg/euler.hpp"
#include "wbdg/field.hpp"
#include "wbdg/mesh.hpp"

namespace wbdg {

/// Explicit Runge-Kutta coefficients; a is stored dense, row-major s x s.
struct ButcherTableau {
  std::string name;
  int stages = 0;
  int nominal_order = 0;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;

  double at(int i, int j) const { return a[i * stages + j]; }
};

namespace detail {

inline ButcherTableau make_tableau(std::string name, int order, std::vector<std::vector<double>> rows,
                                   std::vector<double> b, std::vector<double> c) {
  ButcherTableau t;
  t.name = std::move(name);
  t.stages = static_cast<int>(b.size());
  t.nominal_order = order;
  t.a.assign(t.stages * t.stages, 0.0);
  for (int i = 0; i < t.stages; ++i) {
    for (int j = 0; j < static_cast<int>(rows[i].size()); ++j) t.a[i * t.stages + j] = rows[i][j];
  }
  t.b = std::move(b);
  t.c = std::move(c);
  return t;
}

}  // namespace detail

/// SSP22 (Heun), SSP33 (Shu-Osher) and the five-stage fourth-order SSP45.
/// "SSP22-printed" and "SSP33-printed" are inconsistent variants (first order,
/// and rows not summing to c) kept only for comparison.
inline ButcherTableau tableau(const std::string& name) {
  if (name == "SSP22") {
    return detail::make_tableau(name, 2, {{}, {1.0}}, {0.5, 0.5}, {0.0, 1.0});
  }
  if (name == "SSP33") {
    return detail::make_tableau(name, 3, {{}, {1.0}, {0.25, 0.25}}, {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
                                {0.0, 1.0, 0.5});
  }
  if (name == "SSP45") {
    return detail::make_tableau(name, 4,
                                {{},
                                 {0.39175222700392},
                                 {0.21766909633821, 0.36841059262959},
                                 {0.08269208670950, 0.13995850206999, 0.25189177424738},
                                 {0.06796628370320, 0.11503469844438, 0.20703489864929, 0.54497475021237}},
                                {0.14681187618661, 0.24848290924556, 0.10425883036650, 0.27443890091960,
                                 0.22600748319395},
                                {0.0, 0.39175222700392, 0.58607968896779, 0.47454236302687, 0.93501063100924});
  }
  if (name == "SSP22-printed") {
    return detail::make_tableau(name, 2, {{}, {0.5}}, {0.5, 0.5}, {0.0, 0.5});
  }
  if (name == "SSP33-printed") {
    return detail::make_tableau(name, 3, {{}, {1.0}, {0.25, 0.25}}, {1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0},
                                {0.0, 1.0, 0.75});
  }
  throw std::invalid_argument("unknown tableau: " + name);
}

/// Tableau paired with a DG degree: order Np+1 where available.
inline ButcherTableau tableau_for_degree(int degree) {
  if (degree <= 0) return tableau("SSP22");
  if (degree == 1) return tableau("SSP22");
  if (degree == 2) return tableau("SSP33");
  return tableau("SSP45");
}

/// Largest deviation from the classical order conditions up to `order` (<= 4).
inline double order_condition_defect(const ButcherTableau& t, int order) {
  const int s = t.stages;
  auto sum = [&](auto&& f) {
    double acc = 0.0;
    for (int i = 0; i < s; ++i) acc += f(i);
    return acc;
  };
  auto ac = [&](int i, auto&& g) {
    double acc = 0.0;
    for (int j = 0; j < s; ++j) acc += t.at(i, j) * g(j);
    return acc;
  };
  std::vector<double> defects;
  defects.push_back(sum([&](int i) { return t.b[i]; }) - 1.0);
  if (order >= 2) defects.push_back(sum([&](int i) { return t.b[i] * t.c[i]; }) - 0.5);
  if (order >= 3) {
    defects.push_back(sum([&](int i) { return t.b[i] * t.c[i] * t.c[i]; }) - 1.0 / 3.0);
    defects.push_back(sum([&](int i) { return t.b[i] * ac(i, [&](int j) { return t.c[j]; }); }) - 1.0 / 6.0);
  }
  if (order >= 4) {
    defects.push_back(sum([&](int i) { return t.b[i] * t.c[i] * t.c[i] * t.c[i]; }) - 0.25);
    defects.push_back(sum([&](int i) { return t.b[i] * t.c[i] * ac(i, [&](int j) { return t.c[j]; }); }) - 0.125);
    defects.push_back(sum([&](int i) { return t.b[i] * ac(i, [&](int j) { return t.c[j] * t.c[j]; }); }) -
                      1.0 / 12.0);
    defects.push_back(
        sum([&](int i) { return t.b[i] * ac(i, [&](int j) { return ac(j, [&](int k) { return t.c[k]; }); }); }) -
        1.0 / 24.0);
  }
  double worst = 0.0;
  for (double d : defects) worst = std::max(worst, std::abs(d));
  return worst;
}

/// max_i |sum_j a_ij - c_i|
inline double row_sum_defect(const ButcherTableau& t) {
  double worst = 0.0;
  for (int i = 0; i < t.stages; ++i) {
    double r = 0.0;
    for (int j = 0; j < t.stages; ++j) r += t.at(i, j);
    worst = std::max(worst, std::abs(r - t.c[i]));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Time step

struct StepControl {
  double cfl = 0.2;
  double gamma = 1.4;
  double final_time = 1.0;
};

/// Per-cell step from the cell-average state and |grad Phi| at the cell:
/// min( C/(2Np+1) / sum_i (|v_i| + c_s)/dx_i ,  c_s / (sqrt(2 gamma (gamma-1)) |grad Phi|) ).
template <int Dim>
double cell_dt(const Conserved<Dim>& average, const Vec<Dim>& grad_phi, const Mesh<Dim>& mesh, int degree,
               const StepControl& ctl) {
  const auto w = to_primitive<Dim>(average, ctl.gamma);
  const double cs = std::sqrt(ctl.gamma * w.p / w.rho);
  double rate = 0.0;
  double g2 = 0.0;
  for (int d = 0; d < Dim; ++d) {
    rate += (std::abs(w.v[d]) + cs) / mesh.spacing(d);
    g2 += grad_phi[d] * grad_phi[d];
  }
  const double hyperbolic = ctl.cfl / (2.0 * degree + 1.0) / rate;
  const double gravity = g2 > 0.0 ? cs / (std::sqrt(2.0 * ctl.gamma * (ctl.gamma - 1.0)) * std::sqrt(g2))
                                  : std::numeric_limits<double>::infinity();
  return std::min(hyperbolic, gravity);
}

/// Global step: minimum over included interior cells, clamped so that t + dt
/// does not pass `stop` (the next output time or T).
template <int Dim>
double compute_dt(const Mesh<Dim>& mesh, int degree, const StepControl& ctl,
                  const std::function<Conserved<Dim>(int)>& average, const std::function<Vec<Dim>(int)>& grad_phi,
                  double t, double stop, const std::function<bool(int)>& include = {}) {
  double dt = std::numeric_limits<double>::infinity();
  for (int c = 0; c < mesh.interior_cells(); ++c) {
    if (include && !include(c)) continue;
    dt = std::min(dt, cell_dt<Dim>(average(c), grad_phi(c), mesh, degree, ctl));
  }
  if (!std::isfinite(dt) || !(dt > 0.0)) throw std::runtime_error("compute_dt: non-finite time step");
  if (t + dt > stop) dt = stop - t;
  return dt;
}

// ---------------------------------------------------------------------------
// Runge-Kutta stepping

/// Explicit RK in Butcher form. Stage values are u + dt sum_j a_ij k_j; the
/// post-stage hook runs on every stage value and on the new solution, after
/// which k_i = L(t + c_i dt, stage).
///
/// State needs values() returning a std::vector<double>& and must be copyable.
template <class State>
class RungeKutta {
 public:
  RungeKutta(ButcherTableau tab, const State& prototype) : tab_(std::move(tab)), stage_(prototype) {
    k_.assign(tab_.stages, prototype);
  }

  const ButcherTableau& tableau() const { return tab_; }

  /// L(t, const State& u, State& k); hook(State& u, double t).
  template <class Operator, class Hook>
  void step(State& u, double t, double dt, Operator&& L, Hook&& hook) {
    const auto& base = u.values();
    const std::size_t n = base.size();
    for (int i = 0; i < tab_.stages; ++i) {
      auto& sv = stage_.values();
      std::copy(base.begin(), base.end(), sv.begin());
      for (int j = 0; j < i; ++j) {
        const double a = tab_.at(i, j);
        if (a == 0.0) continue;
        const auto& kj = k_[j].values();
        for (std::size_t x = 0; x < n; ++x) sv[x] += dt * a * kj[x];
      }
      const double ti = t + tab_.c[i] * dt;
      set_time(stage_, ti);
      if (i > 0) hook(stage_, ti);
      L(ti, stage_, k_[i]);
    }
    auto& out = u.values();
    for (int i = 0; i < tab_.stages; ++i) {
      const double b = tab_.b[i];
      const auto& ki = k_[i].values();
      for (std::size_t x = 0; x < n; ++x) out[x] += dt * b * ki[x];
    }
    set_time(u, t + dt);
    hook(u, t + dt);
  }

  template <class Operator>
  void step(State& u, double t, double dt, Operator&& L) {
    step(u, t, dt, std::forward<Operator>(L), [](State&, double) {});
  }

 private:
  static void set_time(State& s, double t) {
    if constexpr (requires { s.set_time(t); }) s.set_time(t);
  }

  ButcherTableau tab_;
  State stage_;
  std::vector<State> k_;
};

/// One step of `tab` from u at time t.
template <class State, class Operator, class Hook>
void advance(State& u, double t, double dt, const ButcherTableau& tab, Operator&& L, Hook&& hook) {
  RungeKutta<State> rk(tab, u);
  rk.step(u, t, dt, std::forward<Operator>(L), std::forward<Hook>(hook));
}

// ---------------------------------------------------------------------------
// Disc damping zones

/// Multiplies each cell's residual block by R(r) at the cell center.
template <int Dim>
void apply_buffer(Residual<Dim>& residual, const RadialZones<Dim>& zones) {
  const auto& mesh = residual.mesh();
  for (int c = 0; c < mesh.interior_cells(); ++c) {
    const double r = zones.relax(zones.radius(mesh.center(c)));
    for (double& x : residual.cell(c)) x *= r;
  }
}

/// Cells with center radius below the inner radius, and the coefficients they
/// are reset to (the equilibrium projection, or zeros for a delta field).
template <int Dim>
class InnerReset {
 public:
  InnerReset(const SolutionField<Dim>& replacement, const RadialZones<Dim>& zones) : zones_(zones) {
    const auto& mesh = replacement.mesh();
    for (int c = 0; c < mesh.interior_cells(); ++c) {
      if (zones.radius(mesh.center(c)) < zones.inner_radius) {
        cells_.push_back(c);
        const auto blk = replacement.cell(c);
        blocks_.insert(blocks_.end(), blk.begin(), blk.end());
      }
    }
  }

  const std::vector<int>& cells() const { return cells_; }
  bool contains(int cell) const { return std::binary_search(cells_.begin(), cells_.end(), cell); }

  void operator()(SolutionField<Dim>& field) const {
    const std::size_t bs = static_cast<std::size_t>(field.modes()) * (Dim + 2);
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      auto dst = field.cell(cells_[k]);
      std::copy(blocks_.begin() + k * bs, blocks_.begin() + (k + 1) * bs, dst.begin());
    }
  }

 private:
  RadialZones<Dim> zones_;
  std::vector<int> cells_;
  std::vector<double> blocks_;
};

/// Overwrites inner cells of `field` with `replacement`.
template <int Dim>
void reset_inner(SolutionField<Dim>& field, const SolutionField<Dim>& replacement, const RadialZones<Dim>& zones) {
  InnerReset<Dim>(replacement, zones)(field);
}

}  // namespace wbdg
