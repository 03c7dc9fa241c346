#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbdg/basis.hpp"
#include "wbdg/equilibria.hpp"
#include "wbdg/euler.hpp"
#include "wbdg/field.hpp"
#include "wbdg/legendre.hpp"
#include "wbdg/mesh.hpp"
#include "wbdg/quadrature.hpp"

namespace wbdg {

template <int Dim>
using PointwiseState = std::function<Conserved<Dim>(const Point<Dim>&)>;

template <int Dim>
std::vector<std::string> variable_names() {
  if constexpr (Dim == 1) {
    return {"rho", "mx", "E"};
  } else {
    return {"rho", "mx", "my", "E"};
  }
}

/// sum_K sum_q |g(K, q)| w_q (dx/2)^Dim for a vector-valued integrand g.
template <int Dim, std::size_t K, class Integrand>
std::array<double, K> l1_quadrature(const Mesh<Dim>& mesh, const Basis<Dim>& basis, Integrand&& g) {
  std::array<double, K> acc{};
  const auto& w = basis.volume_weights();
  const double jac = mesh.jacobian();
  for (int c = 0; c < mesh.interior_cells(); ++c) {
    const auto idx = mesh.unravel(c);
    for (int q = 0; q < basis.volume_points(); ++q) {
      const auto x = mesh.map_to_physical(idx, basis.volume_node(q));
      const std::array<double, K> e = g(c, q, x);
      for (std::size_t k = 0; k < K; ++k) acc[k] += std::abs(e[k]) * w[q] * jac;
    }
  }
  return acc;
}

/// Per-variable L1 error of a DG field against a pointwise reference,
/// sum_K sum_q |w_h - w| w_q (dx/2)^Dim. The default rule is the scheme's own
/// (Np+1)^Dim Gauss points; `points` > 0 selects a finer per-axis rule, which
/// is needed to see pure projection errors (the Np+1 point projection
/// interpolates at its own nodes). With `offset` set the numerical state is
/// offset(x) + field(x), which is how delta fields are measured.
template <int Dim>
Conserved<Dim> l1_error(const SolutionField<Dim>& field, const PointwiseState<Dim>& reference,
                        const PointwiseState<Dim>& offset = {}, int points = 0) {
  const Basis<Dim> basis(field.degree());
  const auto rule = gauss_legendre(points > 0 ? points : field.degree() + 1);
  const int n = rule.size();
  const int nq = Dim == 1 ? n : n * n;
  std::vector<Point<Dim>> nodes(nq);
  std::vector<double> weights(nq);
  std::vector<std::vector<double>> phi(nq);
  for (int q = 0; q < nq; ++q) {
    const int a = Dim == 1 ? q : q / n;
    const int b = Dim == 1 ? 0 : q % n;
    if constexpr (Dim == 1) {
      nodes[q] = {rule.nodes[a]};
      weights[q] = rule.weights[a];
    } else {
      nodes[q] = {rule.nodes[a], rule.nodes[b]};
      weights[q] = rule.weights[a] * rule.weights[b];
    }
    phi[q] = basis.evaluate(nodes[q]);
  }
  const auto& mesh = field.mesh();
  const double jac = mesh.jacobian();
  Conserved<Dim> acc{};
  for (int c = 0; c < mesh.interior_cells(); ++c) {
    const auto idx = mesh.unravel(c);
    for (int q = 0; q < nq; ++q) {
      const auto x = mesh.map_to_physical(idx, nodes[q]);
      auto u = evaluate<Dim>(field, c, std::span<const double>(phi[q]));
      if (offset) {
        const auto o = offset(x);
        for (int v = 0; v < Dim + 2; ++v) u[v] += o[v];
      }
      const auto r = reference(x);
      for (int v = 0; v < Dim + 2; ++v) acc[v] += std::abs(u[v] - r[v]) * weights[q] * jac;
    }
  }
  return acc;
}

template <int Dim>
double sum(const Conserved<Dim>& e) {
  double s = 0.0;
  for (double x : e) s += x;
  return s;
}

// ---------------------------------------------------------------------------
// Convergence

/// log2(e_coarse / e_fine) between successive resolutions, or "exact" when
/// both errors sit at rounding level.
struct Slope {
  double value = std::numeric_limits<double>::quiet_NaN();
  bool exact = false;
  std::string str() const;
};

inline std::string Slope::str() const {
  if (exact) return "exact";
  if (std::isnan(value)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", value);
  return buf;
}

/// Slopes for errors measured at resolutions `n` (need not be doubling; the
/// slope is normalised by log2 of the resolution ratio). Entry 0 is empty.
inline std::vector<Slope> convergence_slopes(const std::vector<double>& errors, const std::vector<int>& n,
                                             double exact_threshold = 1e-11) {
  if (errors.size() != n.size()) throw std::invalid_argument("convergence_slopes: size mismatch");
  std::vector<Slope> out(errors.size());
  for (std::size_t k = 1; k < errors.size(); ++k) {
    if (errors[k - 1] <= exact_threshold && errors[k] <= exact_threshold) {
      out[k].exact = true;
      continue;
    }
    if (!(errors[k] > 0.0) || !(errors[k - 1] > 0.0)) {
      out[k].exact = true;
      continue;
    }
    out[k].value = std::log2(errors[k - 1] / errors[k]) / std::log2(static_cast<double>(n[k]) / n[k - 1]);
  }
  return out;
}

/// Least-squares slope of log2 e against log2 N over all points.
inline double fitted_slope(const std::vector<double>& errors, const std::vector<int>& n) {
  const std::size_t k = errors.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = std::log2(static_cast<double>(n[i]));
    const double y = std::log2(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return -(k * sxy - sx * sy) / (k * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Closed-form update of the 1D scheme on equilibrium data

enum class OracleCase { Static, Moving };

/// H_i = (dx/2) d(coef_i)/dt for every cell, variable and mode, assembled
/// from projected traces with jumps [[f]] = f+ - f- and means <f> at each
/// face. Ghost traces are the analytic equilibrium. The static forms drop all
/// velocity terms; the moving forms assume rho v is constant, so the density
/// row carries only the jump dissipation. Layout matches SolutionField<1>.
inline std::vector<double> update_oracle(const EquilibriumSpec<1>& eq, int n_cells, int degree, OracleCase kind) {
  const double gamma = eq.gamma;
  const auto& dom = eq.domain[0];
  const double dx = dom.length() / n_cells;
  const auto rule = gauss_legendre(degree + 1);
  const int nm = degree + 1;
  const int nq = rule.size();

  // Basis values at nodes and at the cell ends.
  std::vector<LegendreSample> at_node;
  for (int j = 0; j < nq; ++j) at_node.push_back(legendre_eval(degree, rule.nodes[j]));
  const auto left = legendre_eval(degree, -1.0);
  const auto right = legendre_eval(degree, 1.0);

  auto node_x = [&](int k, int j) { return dom.lo + (k + 0.5) * dx + 0.5 * dx * rule.nodes[j]; };

  // Projected coefficients of (rho, m, E).
  std::vector<std::array<std::vector<double>, 3>> coef(n_cells);
  for (int k = 0; k < n_cells; ++k) {
    for (auto& c : coef[k]) c.assign(nm, 0.0);
    for (int j = 0; j < nq; ++j) {
      const auto u = eq.conserved({node_x(k, j)});
      for (int v = 0; v < 3; ++v)
        for (int i = 0; i < nm; ++i) coef[k][v][i] += u[v] * at_node[j].values[i] * rule.weights[j];
    }
  }
  auto value = [&](int k, const std::vector<double>& phi) {
    std::array<double, 3> u{};
    for (int v = 0; v < 3; ++v)
      for (int i = 0; i < nm; ++i) u[v] += coef[k][v][i] * phi[i];
    return u;
  };

  struct Trace {
    double rho, m, E, v, p;
    double cs(double g) const { return std::sqrt(g * p / rho); }
  };
  auto make = [&](const std::array<double, 3>& u) {
    Trace t{u[0], u[1], u[2], u[1] / u[0], 0.0};
    t.p = (gamma - 1.0) * (u[2] - 0.5 * u[1] * u[1] / u[0]);
    return t;
  };
  // Face f sits at dom.lo + f dx; minus side is cell f-1.
  auto face_minus = [&](int f) {
    if (f == 0) return make(eq.conserved({dom.lo}));
    return make(value(f - 1, right.values));
  };
  auto face_plus = [&](int f) {
    if (f == n_cells) return make(eq.conserved({dom.hi}));
    return make(value(f, left.values));
  };

  struct FaceTerms {
    double alpha;
    Trace a, b;  // minus, plus
    double jump(double Trace::*f) const { return b.*f - a.*f; }
  };
  auto face = [&](int f) {
    FaceTerms t{0.0, face_minus(f), face_plus(f)};
    t.alpha = std::max(std::abs(t.a.v) + t.a.cs(gamma), std::abs(t.b.v) + t.b.cs(gamma));
    return t;
  };
  auto mean_mom_flux = [](const FaceTerms& t) {
    return 0.5 * ((t.a.m * t.a.v + t.a.p) + (t.b.m * t.b.v + t.b.p));
  };
  auto mean_energy_flux = [](const FaceTerms& t) {
    return 0.5 * (t.a.v * (t.a.E + t.a.p) + t.b.v * (t.b.E + t.b.p));
  };

  std::vector<double> H(static_cast<std::size_t>(n_cells) * 3 * nm, 0.0);
  for (int k = 0; k < n_cells; ++k) {
    const auto R = face(k + 1);
    const auto L = face(k);
    for (int i = 0; i < nm; ++i) {
      const double pr = right.values[i], pl = left.values[i];
      double h_rho = 0.5 * R.alpha * R.jump(&Trace::rho) * pr - 0.5 * L.alpha * L.jump(&Trace::rho) * pl;
      double h_m = -mean_mom_flux(R) * pr + mean_mom_flux(L) * pl;
      double h_E = 0.5 * R.alpha * R.jump(&Trace::E) * pr - 0.5 * L.alpha * L.jump(&Trace::E) * pl;
      if (kind == OracleCase::Moving) {
        h_E += -mean_energy_flux(R) * pr + mean_energy_flux(L) * pl;
      }
      for (int j = 0; j < nq; ++j) {
        const auto t = make(value(k, at_node[j].values));
        const double dphi = eq.gravity({node_x(k, j)})[0];
        const double w = rule.weights[j];
        const double psi = at_node[j].values[i], dpsi = at_node[j].derivatives[i];
        h_m += -0.5 * dx * t.rho * dphi * psi * w + (t.m * t.v + t.p) * dpsi * w;
        if (kind == OracleCase::Moving) {
          h_E += -0.5 * dx * t.m * dphi * psi * w + t.v * (t.E + t.p) * dpsi * w;
        }
      }
      H[(static_cast<std::size_t>(k) * 3 + 0) * nm + i] = h_rho;
      H[(static_cast<std::size_t>(k) * 3 + 1) * nm + i] = h_m;
      H[(static_cast<std::size_t>(k) * 3 + 2) * nm + i] = h_E;
    }
  }
  return H;
}

// ---------------------------------------------------------------------------
// Reports

struct ErrorReport {
  std::string case_name;
  std::string scheme;
  int order = 0;
  int n = 0;
  std::vector<std::string> variables;
  std::vector<double> l1;
  double runtime_s = 0.0;
  double setup_s = 0.0;
  std::size_t wb_cache_bytes = 0;
  std::vector<std::string> slope;  // per variable, filled by convergence tables
  std::string failure;             // non-empty when the run aborted

  double total() const {
    double s = 0.0;
    for (double e : l1) s += e;
    return s;
  }
};

template <int Dim>
void fill_errors(ErrorReport& r, const Conserved<Dim>& e) {
  r.variables = variable_names<Dim>();
  r.l1.assign(e.begin(), e.end());
  r.variables.push_back("total");
  r.l1.push_back(sum<Dim>(e));
  r.slope.assign(r.l1.size(), "");
}

inline void write_csv_header(std::ostream& os) {
  os << "case,scheme,order,N,variable,l1,runtime_s,wb_cache_bytes,slope\n";
}

inline void write_csv_rows(std::ostream& os, const ErrorReport& r) {
  char buf[64];
  for (std::size_t k = 0; k < r.variables.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", r.l1[k]);
    os << r.case_name << ',' << r.scheme << ',' << r.order << ',' << r.n << ',' << r.variables[k] << ',';
    os << (r.failure.empty() ? std::string(buf) : std::string("nan"));
    std::snprintf(buf, sizeof buf, "%.6f", r.runtime_s);
    os << ',' << buf << ',' << r.wb_cache_bytes << ',' << (k < r.slope.size() ? r.slope[k] : "") << '\n';
  }
}

/// Fills slope columns of reports that share case/scheme/order, in
/// increasing N.
inline void attach_slopes(std::vector<ErrorReport>& reports, double exact_threshold = 1e-11) {
  for (std::size_t a = 0; a < reports.size(); ++a) {
    for (std::size_t b = a + 1; b < reports.size(); ++b) {
      auto& lo = reports[a];
      auto& hi = reports[b];
      if (lo.case_name != hi.case_name || lo.scheme != hi.scheme || lo.order != hi.order) continue;
      if (!lo.failure.empty() || !hi.failure.empty() || hi.n <= lo.n) continue;
      bool next = true;  // only pair with the nearest finer resolution
      for (std::size_t c = a + 1; c < b; ++c) {
        const auto& mid = reports[c];
        if (mid.case_name == lo.case_name && mid.scheme == lo.scheme && mid.order == lo.order && mid.n > lo.n &&
            mid.n < hi.n)
          next = false;
      }
      if (!next) continue;
      for (std::size_t k = 0; k < hi.l1.size() && k < lo.l1.size(); ++k) {
        hi.slope[k] = convergence_slopes({lo.l1[k], hi.l1[k]}, {lo.n, hi.n}, exact_threshold)[1].str();
      }
    }
  }
}

/// Monotonic wall clock.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  void restart() { start_ = std::chrono::steady_clock::now(); }
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace wbdg
