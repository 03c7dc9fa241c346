#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>

#include "wbdg/euler.hpp"
#include "wbdg/mesh.hpp"

namespace wbdg {

/// Damping zones of the disc: the update is multiplied by relax(r) and cells
/// whose center lies inside inner_radius are reset to equilibrium.
template <int Dim>
struct RadialZones {
  Point<Dim> center{};
  double buffer_scale = 15.0;
  double inner_radius = 0.75;

  double radius(const Point<Dim>& x) const {
    double r2 = 0.0;
    for (int d = 0; d < Dim; ++d) r2 += (x[d] - center[d]) * (x[d] - center[d]);
    return std::sqrt(r2);
  }
  /// R(r) = 1 / (1 + exp(r^2 - buffer_scale)).
  double relax(double r) const { return 1.0 / (1.0 + std::exp(r * r - buffer_scale)); }
};

/// Analytic steady state with its gravity field and Dirichlet boundary data.
template <int Dim>
struct EquilibriumSpec {
  std::string name;
  double gamma = 1.4;
  std::array<Interval, Dim> domain{};
  std::function<Primitive<Dim>(const Point<Dim>&)> state;
  /// Time-independent grad Phi that balances `state`.
  std::function<Vec<Dim>(const Point<Dim>&)> gravity;
  double final_time = 10.0;
  std::optional<RadialZones<Dim>> zones;

  Conserved<Dim> conserved(const Point<Dim>& x) const { return to_conserved<Dim>(state(x), gamma); }
};

/// Additive Gaussian pressure pulse eta * exp(-scale * |x - center|^2 / width).
template <int Dim>
struct PressurePulse {
  Point<Dim> center{};
  double width = 0.01;
  double amplitude = 0.0;
  double scale = 1.0;  // rho_0 g / p_0

  double operator()(const Point<Dim>& x) const {
    double r2 = 0.0;
    for (int d = 0; d < Dim; ++d) r2 += (x[d] - center[d]) * (x[d] - center[d]);
    return amplitude * std::exp(-scale * r2 / width);
  }
  /// int exp(-scale r^2 / width) over R^Dim, per unit amplitude.
  double unit_mass() const { return std::pow(std::numbers::pi * width / scale, 0.5 * Dim); }
};

template <int Dim>
PressurePulse<Dim> gaussian_pressure_pulse(Point<Dim> center, double amplitude, double width = 0.01) {
  if (amplitude < 0.0) throw std::invalid_argument("pressure pulse amplitude must be >= 0");
  PressurePulse<Dim> p;
  p.center = center;
  p.amplitude = amplitude;
  p.width = width;
  return p;
}

/// Initial primitive state: equilibrium plus an optional pressure pulse. With
/// a zero amplitude the equilibrium value is returned untouched.
template <int Dim>
std::function<Primitive<Dim>(const Point<Dim>&)> perturbed_state(const EquilibriumSpec<Dim>& eq,
                                                                 std::optional<PressurePulse<Dim>> pulse) {
  if (!pulse || pulse->amplitude == 0.0) return eq.state;
  return [state = eq.state, pulse = *pulse](const Point<Dim>& x) {
    auto w = state(x);
    w.p += pulse(x);
    return w;
  };
}

/// Conserved equilibrium value; the all-zero state (used to recover the
/// classical scheme from the delta form) is passed through unchecked.
template <int Dim>
Conserved<Dim> equilibrium_conserved(const Primitive<Dim>& w, double gamma) {
  if (w.rho == 0.0 && w.p == 0.0) return Conserved<Dim>{};
  return to_conserved<Dim>(w, gamma);
}

/// w_eq = 0 with no gravity; the delta scheme then reduces to classical DG.
template <int Dim>
EquilibriumSpec<Dim> zero_equilibrium(std::array<Interval, Dim> domain, double gamma = 1.4) {
  EquilibriumSpec<Dim> eq;
  eq.name = "zero";
  eq.gamma = gamma;
  eq.domain = domain;
  eq.state = [](const Point<Dim>&) { return Primitive<Dim>{}; };
  eq.gravity = [](const Point<Dim>&) { return Vec<Dim>{}; };
  return eq;
}

// ---------------------------------------------------------------------------
// Catalog

/// Isothermal atmosphere in a linear potential Phi = g x on [0, 1].
inline EquilibriumSpec<1> hydrostatic_1d(double rho0 = 1.0, double p0 = 1.0, double g = 1.0) {
  EquilibriumSpec<1> eq;
  eq.name = "hydro1d";
  eq.domain = {Interval{0.0, 1.0}};
  const double k = rho0 * g / p0;
  eq.state = [=](const Point<1>& x) {
    Primitive<1> w;
    w.rho = rho0 * std::exp(-k * x[0]);
    w.v = {0.0};
    w.p = p0 * std::exp(-k * x[0]);
    return w;
  };
  eq.gravity = [=](const Point<1>&) { return Vec<1>{g}; };
  eq.final_time = 10.0;
  return eq;
}

/// Isothermal atmosphere in Phi = g (x + y) on the unit square.
inline EquilibriumSpec<2> hydrostatic_2d(double rho0 = 1.0, double p0 = 1.0, double g = 1.0) {
  EquilibriumSpec<2> eq;
  eq.name = "hydro2d";
  eq.domain = {Interval{0.0, 1.0}, Interval{0.0, 1.0}};
  const double k = rho0 * g / p0;
  eq.state = [=](const Point<2>& x) {
    Primitive<2> w;
    w.rho = rho0 * std::exp(-k * (x[0] + x[1]));
    w.v = {0.0, 0.0};
    w.p = p0 * std::exp(-k * (x[0] + x[1]));
    return w;
  };
  eq.gravity = [=](const Point<2>&) { return Vec<2>{g, g}; };
  eq.final_time = 10.0;
  return eq;
}

/// Manufactured moving steady state: rho = e^-x, v = e^x, p = e^(-gamma x),
/// with the potential gradient that balances the momentum equation.
inline EquilibriumSpec<1> moving_1d(double gamma = 1.4) {
  EquilibriumSpec<1> eq;
  eq.name = "moving1d";
  eq.gamma = gamma;
  eq.domain = {Interval{0.0, 1.0}};
  eq.state = [=](const Point<1>& x) {
    Primitive<1> w;
    w.rho = std::exp(-x[0]);
    w.v = {std::exp(x[0])};
    w.p = std::exp(-gamma * x[0]);
    return w;
  };
  eq.gravity = [=](const Point<1>& x) {
    const double ex = std::exp(x[0]);
    return Vec<1>{ex * (-ex + gamma * std::exp(-gamma * x[0]))};
  };
  eq.final_time = 10.0;
  return eq;
}

// Gresho vortex balanced by the extra potential alpha / r.
struct GreshoParams {
  Point<2> center{0.5, 0.5};
  double alpha = 0.01;
  // Phi = 1 / sqrt(r^2 + eps^2). With eps = 0 (the bare 1/r) the pressure is
  // negative for r < alpha / 5, which face and volume nodes reach at N = 128.
  double softening = 0.01;
};

inline double gresho_potential(double r, const GreshoParams& prm = {}) {
  if (prm.softening > 0.0) return 1.0 / std::sqrt(r * r + prm.softening * prm.softening);
  return r > 0.0 ? 1.0 / r : 1e12;
}

inline double gresho_azimuthal_velocity(double r) {
  if (r < 0.2) return 5.0 * r;
  if (r < 0.4) return 2.0 - 5.0 * r;
  return 0.0;
}

inline double gresho_pressure(double r, const GreshoParams& prm = {}) {
  const double grav = prm.alpha * gresho_potential(r, prm);
  if (r < 0.2) return 5.0 + 12.5 * r * r - grav;
  if (r < 0.4) return 9.0 - 4.0 * std::log(0.2) + 12.5 * r * r - 20.0 * r + 4.0 * std::log(r) - grav;
  return 3.0 + 4.0 * std::log(2.0) - grav;
}

inline EquilibriumSpec<2> gresho_modified(const GreshoParams& prm = {}) {
  EquilibriumSpec<2> eq;
  eq.name = "gresho";
  eq.domain = {Interval{0.0, 1.0}, Interval{0.0, 1.0}};
  eq.state = [=](const Point<2>& x) {
    const double dx = x[0] - prm.center[0];
    const double dy = x[1] - prm.center[1];
    const double r = std::sqrt(dx * dx + dy * dy);
    Primitive<2> w;
    w.rho = 1.0;
    if (r > 0.0) {
      const double vt = gresho_azimuthal_velocity(r);
      w.v = {-vt * dy / r, vt * dx / r};
    }
    w.p = gresho_pressure(r, prm);
    return w;
  };
  // grad(alpha Phi) = -alpha x / (r^2 + eps^2)^{3/2}
  eq.gravity = [=](const Point<2>& x) {
    const double dx = x[0] - prm.center[0];
    const double dy = x[1] - prm.center[1];
    const double s2 = dx * dx + dy * dy + prm.softening * prm.softening;
    if (s2 == 0.0) return Vec<2>{0.0, 0.0};
    const double f = -prm.alpha / (s2 * std::sqrt(s2));
    return Vec<2>{f * dx, f * dy};
  };
  eq.final_time = 1.0;
  return eq;
}

// ---------------------------------------------------------------------------
// Protoplanetary disc

struct DiscParams {
  double density = 1.0;
  double aspect_ratio = 0.03;  // c_s / v_K
  double softening = 0.01;     // star and planet softening length
  double taper_radius = 4.2;
  double taper_power = 20.0;
  double buffer_scale = 15.0;
  double inner_radius = 0.75;
  double half_width = 6.0;
};

/// d(r) = 1 / (1 + (r / r0)^q).
inline double disc_tampering(double r, const DiscParams& prm = {}) {
  return 1.0 / (1.0 + std::pow(r / prm.taper_radius, prm.taper_power));
}

/// Softened star field x / (r^2 + eps^2)^{3/2}.
inline Vec<2> softened_star_gravity(const Point<2>& x, double softening) {
  const double s2 = x[0] * x[0] + x[1] * x[1] + softening * softening;
  const double f = 1.0 / (s2 * std::sqrt(s2));
  return {f * x[0], f * x[1]};
}

/// Keplerian speed squared r dPhi/dr of the softened star.
inline double disc_keplerian_sq(double r, const DiscParams& prm = {}) {
  const double s2 = r * r + prm.softening * prm.softening;
  return r * r / (s2 * std::sqrt(s2));
}

/// Orbital speed from v^2 / r = (1/rho) dp/dr + dPhi/dr with p = a^2 rho v_K^2.
/// Without softening and tapering this is sqrt((1 - a^2) / r).
inline double disc_orbital_velocity(double r, const DiscParams& prm = {}) {
  if (r == 0.0) return 0.0;
  const double a2 = prm.aspect_ratio * prm.aspect_ratio;
  const double eps2 = prm.softening * prm.softening;
  const double s2 = r * r + eps2;
  const double vk2 = r * r / (s2 * std::sqrt(s2));
  const double dvk2 = r * (2.0 * eps2 - r * r) / (s2 * s2 * std::sqrt(s2));
  const double t = std::pow(r / prm.taper_radius, prm.taper_power);
  const double dlog_rho = -(prm.taper_power / r) * t / (1.0 + t);
  const double v2 = vk2 * (1.0 + a2 * r * dlog_rho) + a2 * r * dvk2;
  return std::sqrt(std::max(v2, 0.0));
}

inline EquilibriumSpec<2> disc(const DiscParams& prm = {}) {
  EquilibriumSpec<2> eq;
  eq.name = "disc";
  eq.domain = {Interval{-prm.half_width, prm.half_width}, Interval{-prm.half_width, prm.half_width}};
  eq.state = [=](const Point<2>& x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
    Primitive<2> w;
    w.rho = prm.density * disc_tampering(r, prm);
    const double vt = disc_orbital_velocity(r, prm);
    if (r > 0.0) w.v = {-vt * x[1] / r, vt * x[0] / r};
    w.p = prm.aspect_ratio * prm.aspect_ratio * w.rho * disc_keplerian_sq(r, prm);
    return w;
  };
  eq.gravity = [=](const Point<2>& x) { return softened_star_gravity(x, prm.softening); };
  // One orbit of the planet at r = 2.2.
  eq.final_time = 2.0 * std::numbers::pi * std::pow(2.2, 1.5);
  RadialZones<2> z;
  z.center = {0.0, 0.0};
  z.buffer_scale = prm.buffer_scale;
  z.inner_radius = prm.inner_radius;
  eq.zones = z;
  return eq;
}

/// Planet on a circular Keplerian orbit; contributes
/// eta (x - x_p) / (|x - x_p|^2 + eps^2)^{3/2} to grad Phi.
struct PlanetGravity {
  double eta = 0.0;
  double orbit_radius = 2.2;
  double softening = 0.01;

  double keplerian_speed() const { return std::sqrt(1.0 / orbit_radius); }
  double period() const { return 2.0 * std::numbers::pi * orbit_radius / keplerian_speed(); }

  Point<2> position(double t) const {
    const double omega = keplerian_speed() / orbit_radius;
    return {orbit_radius * std::cos(omega * t), orbit_radius * std::sin(omega * t)};
  }

  Vec<2> gradient(const Point<2>& x, double t) const {
    const auto xp = position(t);
    const double dx = x[0] - xp[0];
    const double dy = x[1] - xp[1];
    const double s2 = dx * dx + dy * dy + softening * softening;
    const double f = eta / (s2 * std::sqrt(s2));
    return {f * dx, f * dy};
  }
};

inline PlanetGravity planet_gravity(double eta, double orbit_radius = 2.2, double softening = 0.01) {
  if (eta < 0.0) throw std::invalid_argument("planet mass ratio must be >= 0");
  return PlanetGravity{eta, orbit_radius, softening};
}

}  // namespace wbdg
