#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "wbdg/mesh.hpp"

namespace wbdg {

/// (rho, rho v_x[, rho v_y], E). Also used for fluxes and sources.
template <int Dim>
using Conserved = std::array<double, Dim + 2>;

template <int Dim>
struct Primitive {
  double rho = 0.0;
  Vec<Dim> v{};
  double p = 0.0;
};

class AdmissibilityError : public std::runtime_error {
 public:
  explicit AdmissibilityError(const std::string& what) : std::runtime_error(what) {}
};

template <int Dim>
constexpr int variable_count() {
  return Dim + 2;
}

template <int Dim>
std::string describe(const Conserved<Dim>& u) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (int k = 0; k < Dim + 2; ++k) os << (k ? ", " : "") << u[k];
  os << ")";
  return os.str();
}

/// (gamma - 1)(E - |m|^2 / (2 rho)) without admissibility checks.
template <int Dim>
double pressure_of(const Conserved<Dim>& u, double gamma) {
  double m2 = 0.0;
  for (int d = 0; d < Dim; ++d) m2 += u[1 + d] * u[1 + d];
  return (gamma - 1.0) * (u[Dim + 1] - 0.5 * m2 / u[0]);
}

template <int Dim>
Primitive<Dim> to_primitive(const Conserved<Dim>& u, double gamma) {
  Primitive<Dim> w;
  w.rho = u[0];
  if (!(w.rho > 0.0)) throw AdmissibilityError("non-positive density in state " + describe<Dim>(u));
  double kinetic = 0.0;
  for (int d = 0; d < Dim; ++d) {
    w.v[d] = u[1 + d] / w.rho;
    kinetic += u[1 + d] * w.v[d];
  }
  w.p = (gamma - 1.0) * (u[Dim + 1] - 0.5 * kinetic);
  if (!(w.p > 0.0)) throw AdmissibilityError("non-positive pressure in state " + describe<Dim>(u));
  return w;
}

template <int Dim>
Conserved<Dim> to_conserved(const Primitive<Dim>& w, double gamma) {
  if (!(w.rho > 0.0) || !(w.p > 0.0)) {
    std::ostringstream os;
    os << "inadmissible primitive state rho=" << w.rho << " p=" << w.p;
    throw AdmissibilityError(os.str());
  }
  Conserved<Dim> u{};
  u[0] = w.rho;
  double kinetic = 0.0;
  for (int d = 0; d < Dim; ++d) {
    u[1 + d] = w.rho * w.v[d];
    kinetic += w.rho * w.v[d] * w.v[d];
  }
  u[Dim + 1] = w.p / (gamma - 1.0) + 0.5 * kinetic;
  return u;
}

template <int Dim>
double sound_speed(const Primitive<Dim>& w, double gamma) {
  if (!(w.rho > 0.0) || !(w.p > 0.0)) throw AdmissibilityError("sound_speed: inadmissible state");
  return std::sqrt(gamma * w.p / w.rho);
}

/// Physical flux along one axis from an already converted primitive state.
template <int Dim>
Conserved<Dim> physical_flux(const Conserved<Dim>& u, const Primitive<Dim>& w, int axis) {
  Conserved<Dim> f{};
  const double vn = w.v[axis];
  f[0] = u[1 + axis];
  for (int d = 0; d < Dim; ++d) f[1 + d] = u[1 + d] * vn;
  f[1 + axis] += w.p;
  f[Dim + 1] = vn * (u[Dim + 1] + w.p);
  return f;
}

template <int Dim>
Conserved<Dim> physical_flux(const Conserved<Dim>& u, int axis, double gamma) {
  return physical_flux<Dim>(u, to_primitive<Dim>(u, gamma), axis);
}

/// Local Lax-Friedrichs flux through a face normal to `axis`. `minus` is the
/// trace on the negative-normal side. sign = +1 returns the flux along +axis,
/// sign = -1 the flux along -axis (the same face seen from the other cell).
template <int Dim>
Conserved<Dim> llf_flux(const Conserved<Dim>& minus, const Conserved<Dim>& plus, int axis, int sign, double gamma) {
  const auto wm = to_primitive<Dim>(minus, gamma);
  const auto wp = to_primitive<Dim>(plus, gamma);
  const auto fm = physical_flux<Dim>(minus, wm, axis);
  const auto fp = physical_flux<Dim>(plus, wp, axis);
  const double alpha = std::max(std::abs(wm.v[axis]) + std::sqrt(gamma * wm.p / wm.rho),
                                std::abs(wp.v[axis]) + std::sqrt(gamma * wp.p / wp.rho));
  Conserved<Dim> h{};
  for (int k = 0; k < Dim + 2; ++k) {
    h[k] = 0.5 * (fm[k] + fp[k]) - 0.5 * alpha * (plus[k] - minus[k]);
    if (sign < 0) h[k] = -h[k];
  }
  return h;
}

/// (0, -rho grad Phi, -rho v . grad Phi).
template <int Dim>
Conserved<Dim> gravity_source(const Primitive<Dim>& w, const Vec<Dim>& grad_phi) {
  Conserved<Dim> s{};
  double work = 0.0;
  for (int d = 0; d < Dim; ++d) {
    s[1 + d] = -w.rho * grad_phi[d];
    work += w.v[d] * s[1 + d];
  }
  s[Dim + 1] = work;
  return s;
}

/// Same source written on conserved variables: -(rho v) . grad Phi for the energy.
template <int Dim>
Conserved<Dim> gravity_source(const Conserved<Dim>& u, const Vec<Dim>& grad_phi) {
  Conserved<Dim> s{};
  double work = 0.0;
  for (int d = 0; d < Dim; ++d) {
    s[1 + d] = -u[0] * grad_phi[d];
    work -= u[1 + d] * grad_phi[d];
  }
  s[Dim + 1] = work;
  return s;
}

/// grad Phi(x, t): a time-independent part plus an optional moving part.
/// Only the gradient enters the scheme.
template <int Dim>
struct GravityField {
  std::function<Vec<Dim>(const Point<Dim>&)> steady;
  std::function<Vec<Dim>(const Point<Dim>&, double)> transient;

  bool time_dependent() const { return static_cast<bool>(transient); }

  Vec<Dim> gradient(const Point<Dim>& x, double t) const {
    Vec<Dim> g{};
    if (steady) g = steady(x);
    if (transient) {
      const auto extra = transient(x, t);
      for (int d = 0; d < Dim; ++d) g[d] += extra[d];
    }
    return g;
  }
};

}  // namespace wbdg
