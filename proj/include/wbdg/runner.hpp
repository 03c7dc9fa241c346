#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbdg/dg_operator.hpp"
#include "wbdg/diagnostics.hpp"
#include "wbdg/equilibria.hpp"
#include "wbdg/limiter.hpp"
#include "wbdg/snapshot.hpp"
#include "wbdg/time_integrator.hpp"
#include "wbdg/well_balanced.hpp"

namespace wbdg {

enum class Scheme { DG, WBDG };
enum class LimiterMode { Auto, On, Off };

/// Planet mass above which disc runs switch the positivity limiter on.
inline constexpr double kDiscLimiterThreshold = 9.5e-4;

struct RunConfig {
  std::string case_name = "hydro1d";
  Scheme scheme = Scheme::DG;
  int order = 2;
  int n = 32;
  double cfl = 0.2;
  double eta = 0.0;
  std::optional<double> t_final;
  std::optional<double> rotations;
  CacheStrategy strategy = CacheStrategy::Stored;
  LimiterMode limiter = LimiterMode::Auto;
  double limiter_floor = 1e-13;  // below the disc equilibrium (p ~ 8e-11 in the corners)
  double output_every = 0.0;  // 0: final state only
  std::string output_dir;     // empty: no files
  int samples_per_cell = 4;
  std::uint64_t seed = 0;  // reserved
  std::string tableau;     // empty: paired with the order
  int error_points = 0;    // per-axis Gauss points of the L1 rule; 0: the scheme's Np+1

  int degree() const { return order - 1; }
  std::string label() const { return (scheme == Scheme::WBDG ? "WBDG" : "DG") + std::to_string(order); }
};

inline const std::vector<std::string>& known_cases() {
  static const std::vector<std::string> names = {"hydro1d", "hydro2d", "moving1d", "gresho", "disc"};
  return names;
}

inline int case_dims(const std::string& name) {
  if (name == "hydro1d" || name == "moving1d") return 1;
  if (name == "hydro2d" || name == "gresho" || name == "disc") return 2;
  throw std::invalid_argument("unknown case '" + name + "'");
}

inline bool case_has_pulse(const std::string& name) {
  return name == "hydro1d" || name == "hydro2d" || name == "moving1d";
}

/// "DG3" / "WBDG2" / "dg" into scheme and (optionally) order.
inline std::pair<Scheme, std::optional<int>> parse_scheme(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  Scheme scheme;
  std::string rest;
  if (s.rfind("WBDG", 0) == 0) {
    scheme = Scheme::WBDG;
    rest = s.substr(4);
  } else if (s.rfind("DG", 0) == 0) {
    scheme = Scheme::DG;
    rest = s.substr(2);
  } else {
    throw std::invalid_argument("unknown scheme '" + s + "'");
  }
  if (rest.empty()) return {scheme, std::nullopt};
  std::size_t used = 0;
  int order = 0;
  try {
    order = std::stoi(rest, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != rest.size()) throw std::invalid_argument("unknown scheme '" + s + "'");
  return {scheme, order};
}

inline CacheStrategy parse_strategy(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "rec" || s == "recompute") return CacheStrategy::Recompute;
  if (s == "mem" || s == "stored") return CacheStrategy::Stored;
  throw std::invalid_argument("unknown WB strategy '" + s + "' (expected Rec or Mem)");
}

inline LimiterMode parse_limiter(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "auto") return LimiterMode::Auto;
  if (s == "on" || s == "true" || s == "1") return LimiterMode::On;
  if (s == "off" || s == "false" || s == "0") return LimiterMode::Off;
  throw std::invalid_argument("unknown limiter mode '" + s + "' (expected auto, on or off)");
}

/// Throws std::invalid_argument on any unsupported combination.
inline void validate(const RunConfig& c) {
  const int dims = case_dims(c.case_name);
  (void)dims;
  if (c.scheme == Scheme::DG && (c.order < 2 || c.order > 5))
    throw std::invalid_argument("DG order must be 2..5, got " + std::to_string(c.order));
  if (c.scheme == Scheme::WBDG && (c.order < 2 || c.order > 3))
    throw std::invalid_argument("WBDG order must be 2 or 3, got " + std::to_string(c.order));
  if (c.n < 1) throw std::invalid_argument("N must be >= 1");
  if (!(c.cfl > 0.0)) throw std::invalid_argument("CFL constant must be positive");
  if (!(c.eta >= 0.0)) throw std::invalid_argument("eta must be >= 0");
  if (c.case_name == "gresho" && c.eta != 0.0)
    throw std::invalid_argument("case gresho defines no perturbation parameter (eta)");
  if ((c.case_name == "gresho" || c.case_name == "disc") && c.n % 2 != 0)
    throw std::invalid_argument("case " + c.case_name + " needs an even N so the origin is a cell vertex");
  if (c.rotations && c.case_name != "disc") throw std::invalid_argument("rotations only apply to the disc case");
  if (c.rotations && !(*c.rotations > 0.0)) throw std::invalid_argument("rotations must be positive");
  if (c.t_final && !(*c.t_final >= 0.0)) throw std::invalid_argument("final time must be >= 0");
  if (c.t_final && c.rotations) throw std::invalid_argument("give either a final time or a rotation count");
  if (!(c.output_every >= 0.0)) throw std::invalid_argument("output cadence must be >= 0");
  if (c.samples_per_cell < 1) throw std::invalid_argument("samples per cell must be >= 1");
  if (!(c.limiter_floor > 0.0)) throw std::invalid_argument("limiter floor must be positive");
  if (!c.tableau.empty()) tableau(c.tableau);
  if (c.error_points < 0 || c.error_points > 20) throw std::invalid_argument("error points must be 0..20");
}

inline bool limiter_enabled(const RunConfig& c) {
  if (c.limiter == LimiterMode::On) return true;
  if (c.limiter == LimiterMode::Off) return false;
  if (c.case_name != "disc") return false;
  // The classical scheme loses positivity next to the star even without a
  // planet, where the cold disc has p ~ 1e-3 of the kinetic energy.
  return c.scheme == Scheme::DG || c.eta >= kDiscLimiterThreshold;
}

/// Stable description of everything that affects the numbers.
inline std::string canonical(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << c.case_name << '|' << c.label() << '|' << c.n << '|' << c.cfl << '|' << c.eta << '|'
     << (c.t_final ? *c.t_final : -1.0) << '|' << (c.rotations ? *c.rotations : -1.0) << '|'
     << to_string(c.strategy) << '|' << limiter_enabled(c) << '|' << c.limiter_floor << '|' << c.tableau;
  return os.str();
}

/// 64-bit FNV-1a.
inline std::uint64_t config_hash(const RunConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Cases

template <int Dim>
struct CaseSetup {
  EquilibriumSpec<Dim> eq;
  std::optional<PressurePulse<Dim>> pulse;
  GravityField<Dim> gravity;
  double final_time = 0.0;
  double period = 0.0;  // disc: planet orbital period
  std::optional<PlanetGravity> planet;

  std::function<Primitive<Dim>(const Point<Dim>&)> initial() const { return perturbed_state<Dim>(eq, pulse); }
};

template <int Dim>
CaseSetup<Dim> setup_case(const RunConfig& c) {
  validate(c);
  if (case_dims(c.case_name) != Dim)
    throw std::invalid_argument("case " + c.case_name + " is not " + std::to_string(Dim) + "D");
  CaseSetup<Dim> s;
  if constexpr (Dim == 1) {
    if (c.case_name == "hydro1d") {
      s.eq = hydrostatic_1d();
      if (c.eta > 0.0) s.pulse = gaussian_pressure_pulse<1>({0.5}, c.eta);
    } else {
      s.eq = moving_1d();
      if (c.eta > 0.0) s.pulse = gaussian_pressure_pulse<1>({0.3}, c.eta);
    }
  } else {
    if (c.case_name == "hydro2d") {
      s.eq = hydrostatic_2d();
      if (c.eta > 0.0) s.pulse = gaussian_pressure_pulse<2>({0.3, 0.3}, c.eta);
    } else if (c.case_name == "gresho") {
      s.eq = gresho_modified();
    } else {
      s.eq = disc();
      s.period = planet_gravity(0.0).period();
      if (c.eta > 0.0) {
        s.planet = planet_gravity(c.eta);
        s.gravity.transient = [p = *s.planet](const Point<2>& x, double t) { return p.gradient(x, t); };
      }
    }
  }
  s.gravity.steady = s.eq.gravity;
  s.final_time = s.eq.final_time;
  if (c.t_final) s.final_time = *c.t_final;
  if (c.rotations) s.final_time = *c.rotations * s.period;
  return s;
}

// ---------------------------------------------------------------------------
// Single run

template <int Dim>
struct RunResult {
  RunConfig config;
  CaseSetup<Dim> setup;
  SolutionField<Dim> field;  // delta w for WBDG
  bool is_delta = false;
  ErrorReport report;
  long steps = 0;
  std::vector<std::string> outputs;

  /// Numerical state w_h(x) (w_eq + delta for WBDG).
  Conserved<Dim> state_at(const Point<Dim>& x) const {
    auto u = evaluate_at<Dim>(field, x);
    if (is_delta) {
      const auto e = setup.eq.conserved(x);
      for (int v = 0; v < Dim + 2; ++v) u[v] += e[v];
    }
    return u;
  }

  Snapshot snapshot() const {
    return make_snapshot<Dim>(field, config.case_name, config.label(), config.order, setup.eq.gamma,
                              config_hash(config), is_delta);
  }
};

/// Observer called after each output time (and at the end), with the
/// evolved field (delta for WBDG).
template <int Dim>
using OutputObserver = std::function<void(const SolutionField<Dim>&, double, int)>;

namespace detail {

template <int Dim>
std::string output_stem(const RunConfig& c) {
  std::string s = c.case_name + "_" + c.label() + "_N" + std::to_string(c.n);
  if (c.eta > 0.0) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_eta%.3g", c.eta);
    s += buf;
  }
  return s;
}

template <int Dim>
std::vector<std::string> write_outputs(const RunConfig& c, const CaseSetup<Dim>& setup,
                                       const SolutionField<Dim>& field, bool is_delta, int index,
                                       const std::string& tag = "") {
  std::filesystem::create_directories(c.output_dir);
  char num[16];
  std::snprintf(num, sizeof num, "%04d", index);
  const std::string base = c.output_dir + "/" + output_stem<Dim>(c) + "_" + (tag.empty() ? num : tag);
  save_snapshot(base + ".snap",
                make_snapshot<Dim>(field, c.case_name, c.label(), c.order, setup.eq.gamma, config_hash(c), is_delta));
  std::ofstream os(base + ".csv");
  if (!os) throw std::runtime_error("cannot write " + base + ".csv");
  const auto& eq = setup.eq;
  const std::function<Conserved<Dim>(const Point<Dim>&)> eqf = [&](const Point<Dim>& x) { return eq.conserved(x); };
  if (is_delta) {
    write_sampled_csv<Dim>(os, field, eq.gamma, c.samples_per_cell, eqf);
  } else {
    write_sampled_csv<Dim>(os, field, eq.gamma, c.samples_per_cell, {}, eqf);
  }
  return {base + ".snap", base + ".csv"};
}

}  // namespace detail

/// L1 error of the pressure against the equilibrium pressure.
template <int Dim>
double pressure_l1(const SolutionField<Dim>& field, bool is_delta, const EquilibriumSpec<Dim>& eq) {
  const Basis<Dim> basis(field.degree());
  const int nm = basis.modes();
  const auto e = l1_quadrature<Dim, 1>(field.mesh(), basis, [&](int c, int q, const Point<Dim>& x) {
    auto u = evaluate<Dim>(field, c, std::span<const double>(basis.phi() + q * nm, nm));
    const auto ue = eq.conserved(x);
    if (is_delta)
      for (int v = 0; v < Dim + 2; ++v) u[v] += ue[v];
    return std::array<double, 1>{pressure_of<Dim>(u, eq.gamma) - pressure_of<Dim>(ue, eq.gamma)};
  });
  return e[0];
}

/// Projects the initial state, advances to the final time with the paired
/// SSP-RK method and returns the final field with an error report against
/// the case equilibrium. Admissibility failures during the run are recorded
/// in report.failure and the last good state is returned.
template <int Dim>
RunResult<Dim> run_single(const RunConfig& config, const OutputObserver<Dim>& observer = {}) {
  Stopwatch setup_clock;
  auto case_setup = setup_case<Dim>(config);
  std::array<int, Dim> counts;
  counts.fill(config.n);
  const auto mesh = build_mesh<Dim>(case_setup.eq.domain, counts);
  RunResult<Dim> res{config, std::move(case_setup), SolutionField<Dim>(mesh, config.degree())};
  auto& setup = res.setup;
  const auto& eq = setup.eq;
  const bool wb = config.scheme == Scheme::WBDG;
  res.is_delta = wb;

  DgOperator<Dim> op(mesh, config.degree(), eq.gamma, setup.gravity, eq.state);
  std::optional<EquilibriumCache<Dim>> cache;
  if (wb) cache.emplace(eq, op, config.strategy);

  SolutionField<Dim> u = wb ? project_delta<Dim>(setup.initial(), eq, mesh, op.basis())
                            : project<Dim>(setup.initial(), eq.gamma, mesh, op.basis());
  // Projected data can have negative pressure at nodes where kinetic energy
  // dominates (next to the disc's star). Limiting the projection fixes this
  // and leaves admissible cells bitwise unchanged.
  LimiterConfig initial_cfg;
  initial_cfg.floor = config.limiter_floor;
  const PositivityLimiter<Dim> initial_limiter(op.basis(), eq.gamma, initial_cfg);
  if (!wb) initial_limiter.apply(u);

  // Post-stage hooks: positivity limiter, then the disc inner reset.
  LimiterConfig lcfg;
  lcfg.enabled = limiter_enabled(config);
  lcfg.floor = config.limiter_floor;
  std::optional<PositivityLimiter<Dim>> limiter;
  std::optional<WellBalancedLimiter<Dim>> wb_limiter;
  if (lcfg.enabled) {
    if (wb) {
      wb_limiter.emplace(op, *cache, lcfg);
    } else {
      limiter.emplace(op.basis(), eq.gamma, lcfg);
    }
  }
  std::optional<InnerReset<Dim>> inner;
  if (eq.zones) {
    SolutionField<Dim> replacement = wb ? op.make_field() : project<Dim>(eq.state, eq.gamma, mesh, op.basis());
    if (!wb) initial_limiter.apply(replacement);
    inner.emplace(replacement, *eq.zones);
  }
  auto hook = [&](SolutionField<Dim>& s, double) {
    if (wb_limiter) wb_limiter->apply(s);
    if (limiter) limiter->apply(s);
    if (inner) (*inner)(s);
  };
  auto rhs = [&](double t, const SolutionField<Dim>& s, SolutionField<Dim>& k) {
    if (wb) {
      residual_wb<Dim>(op, s, *cache, t, k);
    } else {
      op.residual(s, t, k);
    }
    if (eq.zones) apply_buffer<Dim>(k, *eq.zones);
  };

  StepControl ctl;
  ctl.cfl = config.cfl;
  ctl.gamma = eq.gamma;
  ctl.final_time = setup.final_time;
  std::vector<Point<Dim>> centers(mesh.interior_cells());
  for (int c = 0; c < mesh.interior_cells(); ++c) centers[c] = mesh.center(mesh.unravel(c));
  const std::function<bool(int)> include = inner ? std::function<bool(int)>([&](int c) { return !inner->contains(c); })
                                                 : std::function<bool(int)>{};

  const ButcherTableau tab = config.tableau.empty() ? tableau_for_degree(config.degree()) : tableau(config.tableau);
  RungeKutta<SolutionField<Dim>> rk(tab, u);

  auto& report = res.report;
  report.case_name = config.case_name;
  report.scheme = config.label();
  report.order = config.order;
  report.n = config.n;
  report.wb_cache_bytes = cache ? cache->stored_bytes() : 0;
  report.setup_s = setup_clock.seconds();

  const bool files = !config.output_dir.empty();
  int out_index = 0;
  auto emit = [&](const SolutionField<Dim>& f, double t) {
    if (observer) observer(f, t, out_index);
    if (files) {
      auto paths = detail::write_outputs<Dim>(config, setup, f, wb, out_index);
      res.outputs.insert(res.outputs.end(), paths.begin(), paths.end());
    }
    ++out_index;
  };

  double t = 0.0;
  const double T = setup.final_time;
  double loop_s = 0.0;
  SolutionField<Dim> last_good = u;
  if (config.output_every > 0.0) emit(u, t);
  double next_out = config.output_every > 0.0 ? std::min(config.output_every, T) : T;
  try {
    Stopwatch clock;
    while (t < T) {
      const double stop = std::min(next_out, T);
      const double dt = compute_dt<Dim>(
          mesh, config.degree(), ctl,
          [&](int c) {
            auto a = u.average(c);
            if (wb) {
              const auto& e = cache->average(c);
              for (int v = 0; v < Dim + 2; ++v) a[v] += e[v];
            }
            return a;
          },
          [&](int c) { return setup.gravity.gradient(centers[c], t); }, t, stop, include);
      std::copy(u.values().begin(), u.values().end(), last_good.values().begin());
      last_good.set_time(t);
      rk.step(u, t, dt, rhs, hook);
      t = (t + dt >= stop) ? stop : t + dt;
      u.set_time(t);
      ++res.steps;
      for (double x : u.values())
        if (!std::isfinite(x)) throw std::runtime_error("non-finite coefficient at t = " + std::to_string(t));
      if (t >= stop && config.output_every > 0.0 && stop < T) {
        loop_s += clock.seconds();
        emit(u, t);
        clock.restart();
        next_out += config.output_every;
      }
    }
    loop_s += clock.seconds();
  } catch (const std::exception& e) {
    report.failure = e.what();
    u = last_good;
  }
  report.runtime_s = loop_s;

  if (report.failure.empty() && (config.output_every > 0.0 || files)) {
    emit(u, t);
  } else if (!report.failure.empty() && files) {
    auto paths = detail::write_outputs<Dim>(config, setup, u, wb, out_index, "lastgood");
    res.outputs.insert(res.outputs.end(), paths.begin(), paths.end());
  }

  const PointwiseState<Dim> ref = [&](const Point<Dim>& x) { return eq.conserved(x); };
  try {
    fill_errors<Dim>(report, wb ? l1_error<Dim>(u, ref, ref, config.error_points)
                                : l1_error<Dim>(u, ref, {}, config.error_points));
    report.variables.push_back("p");
    report.l1.push_back(pressure_l1<Dim>(u, wb, eq));
    report.slope.push_back("");
  } catch (const std::exception& e) {
    if (report.failure.empty()) report.failure = e.what();
  }
  if (report.variables.empty()) {
    report.variables = variable_names<Dim>();
    report.variables.push_back("total");
    report.variables.push_back("p");
    report.l1.assign(report.variables.size(), std::numeric_limits<double>::quiet_NaN());
    report.slope.assign(report.variables.size(), "");
  }
  res.field = std::move(u);
  return res;
}

/// Dimension-erased run: the report and the final snapshot.
struct RunSummary {
  ErrorReport report;
  Snapshot snapshot;
  long steps = 0;
  std::vector<std::string> outputs;
};

inline RunSummary run(const RunConfig& config) {
  auto pack = [](auto&& r) {
    return RunSummary{r.report, r.snapshot(), r.steps, r.outputs};
  };
  if (case_dims(config.case_name) == 1) return pack(run_single<1>(config));
  return pack(run_single<2>(config));
}

// ---------------------------------------------------------------------------
// Sweeps

/// Error report for a run that could not even start.
inline ErrorReport failed_report(const RunConfig& c, const std::string& why) {
  ErrorReport r;
  r.case_name = c.case_name;
  r.scheme = c.label();
  r.order = c.order;
  r.n = c.n;
  r.failure = why;
  r.variables = case_dims(c.case_name) == 1 ? variable_names<1>() : variable_names<2>();
  r.variables.push_back("total");
  r.variables.push_back("p");
  r.l1.assign(r.variables.size(), std::numeric_limits<double>::quiet_NaN());
  r.slope.assign(r.variables.size(), "");
  return r;
}

using Progress = std::function<void(const ErrorReport&)>;

/// Every (scheme, N) pair from `base`, with slopes between successive N.
/// Failing rows are recorded and the sweep continues.
inline std::vector<ErrorReport> run_convergence(const RunConfig& base, const std::vector<std::string>& schemes,
                                                const std::vector<int>& ns, const Progress& progress = {}) {
  if (ns.size() < 2) throw std::invalid_argument("convergence sweep needs at least two resolutions");
  std::vector<ErrorReport> out;
  for (const auto& label : schemes) {
    const auto [scheme, order] = parse_scheme(label);
    for (int n : ns) {
      RunConfig c = base;
      c.scheme = scheme;
      if (order) c.order = *order;
      c.n = n;
      c.output_dir.clear();
      try {
        out.push_back(run(c).report);
      } catch (const std::exception& e) {
        out.push_back(failed_report(c, e.what()));
      }
      if (progress) progress(out.back());
    }
  }
  attach_slopes(out);
  return out;
}

/// One row of an amplitude sweep: L1 distance of the p - p_eq waveform to the
/// reference, next to the pulse's own L1 mass.
struct PulseRow {
  std::string case_name;
  std::string scheme;
  int order = 0;
  int n = 0;
  double eta = 0.0;
  double waveform_l1 = 0.0;
  double pulse_mass = 0.0;
  double runtime_s = 0.0;
  std::string failure;
};

inline void write_pulse_header(std::ostream& os) {
  os << "case,scheme,order,N,eta,waveform_l1,pulse_mass,ratio,runtime_s\n";
}

inline void write_pulse_row(std::ostream& os, const PulseRow& r) {
  char buf[256];
  if (r.failure.empty()) {
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%d,%.3g,%.17g,%.17g,%.6g,%.6f\n", r.case_name.c_str(), r.scheme.c_str(),
                  r.order, r.n, r.eta, r.waveform_l1, r.pulse_mass, r.waveform_l1 / r.pulse_mass, r.runtime_s);
  } else {
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%d,%.3g,nan,%.17g,nan,%.6f\n", r.case_name.c_str(), r.scheme.c_str(),
                  r.order, r.n, r.eta, r.pulse_mass, r.runtime_s);
  }
  os << buf;
}

/// L1 distance between the pressure of `run` and of `reference`, both taken
/// as p(w_h) at the quadrature points of `run`. The equilibrium pressure is
/// common to both waveforms and cancels.
template <int Dim>
double waveform_distance(const RunResult<Dim>& run, const RunResult<Dim>& reference) {
  const auto& field = run.field;
  const Basis<Dim> basis(field.degree());
  const int nm = basis.modes();
  const double gamma = run.setup.eq.gamma;
  const auto e = l1_quadrature<Dim, 1>(field.mesh(), basis, [&](int c, int q, const Point<Dim>& x) {
    auto u = evaluate<Dim>(field, c, std::span<const double>(basis.phi() + q * nm, nm));
    const auto ue = run.setup.eq.conserved(x);
    if (run.is_delta)
      for (int v = 0; v < Dim + 2; ++v) u[v] += ue[v];
    const double dp_run = pressure_of<Dim>(u, gamma) - pressure_of<Dim>(ue, gamma);
    const double dp_ref = pressure_of<Dim>(reference.state_at(x), gamma) - pressure_of<Dim>(ue, gamma);
    return std::array<double, 1>{dp_run - dp_ref};
  });
  return e[0];
}

struct PulseSweep {
  std::vector<PulseRow> rows;
  std::vector<std::string> outputs;
};

/// For each eta: a WBDG3 reference at `reference_n`, then every scheme at `n`.
/// Final time defaults to T = 0.25.
template <int Dim>
PulseSweep run_pulse_sweep(const RunConfig& base, const std::vector<double>& etas,
                           const std::vector<std::string>& schemes, int reference_n,
                           const std::function<void(const PulseRow&)>& progress = {}) {
  if (!case_has_pulse(base.case_name)) throw std::invalid_argument("case " + base.case_name + " has no pressure pulse");
  PulseSweep out;
  for (double eta : etas) {
    if (!(eta > 0.0)) throw std::invalid_argument("pulse amplitudes must be positive");
    RunConfig rc = base;
    rc.scheme = Scheme::WBDG;
    rc.order = 3;
    rc.n = reference_n;
    rc.eta = eta;
    if (!rc.t_final) rc.t_final = 0.25;
    rc.output_dir.clear();
    rc.output_every = 0.0;
    const auto reference = run_single<Dim>(rc);
    if (!reference.report.failure.empty())
      throw std::runtime_error("pulse reference run failed: " + reference.report.failure);
    for (const auto& label : schemes) {
      RunConfig c = base;
      const auto [scheme, order] = parse_scheme(label);
      c.scheme = scheme;
      if (order) c.order = *order;
      c.eta = eta;
      if (!c.t_final) c.t_final = 0.25;
      c.output_every = 0.0;
      PulseRow row;
      row.case_name = c.case_name;
      row.scheme = c.label();
      row.order = c.order;
      row.n = c.n;
      row.eta = eta;
      try {
        const auto res = run_single<Dim>(c);
        row.pulse_mass = res.setup.pulse->amplitude * res.setup.pulse->unit_mass();
        row.runtime_s = res.report.runtime_s;
        row.failure = res.report.failure;
        if (row.failure.empty()) row.waveform_l1 = waveform_distance<Dim>(res, reference);
        out.outputs.insert(out.outputs.end(), res.outputs.begin(), res.outputs.end());
      } catch (const std::exception& e) {
        row.failure = e.what();
      }
      if (progress) progress(row);
      out.rows.push_back(row);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Disc

/// Disc run with a snapshot every rotation of the planet.
inline RunResult<2> run_disc(RunConfig c, double eta, double rotations,
                             const OutputObserver<2>& observer = {}) {
  c.case_name = "disc";
  c.eta = eta;
  c.t_final.reset();
  c.rotations = rotations;
  c.output_every = planet_gravity(0.0).period();
  return run_single<2>(c, observer);
}

/// Annulus used for disc measurements: outside the inner reset zone and
/// inside the region where the outer relaxation factor exceeds `relax_min`.
struct Annulus {
  double r_min = 1.0;
  double r_max = 3.2;
};

inline Annulus clean_annulus(const RadialZones<2>& z, double margin = 0.25, double relax_min = 0.99) {
  Annulus a;
  a.r_min = z.inner_radius + margin;
  a.r_max = std::sqrt(z.buffer_scale + std::log(1.0 / relax_min - 1.0));
  return a;
}

/// max |rho_a - rho_b| over volume quadrature points in the annulus, where
/// rho_b is the equilibrium density when `b` is null.
inline double max_density_difference(const RunResult<2>& a, const RunResult<2>* b, const Annulus& ann) {
  const auto& field = a.field;
  const auto& mesh = field.mesh();
  const Basis<2> basis(field.degree());
  const int nm = basis.modes();
  if (b && !(b->field.same_shape(field) && b->is_delta == a.is_delta))
    throw std::invalid_argument("disc comparison needs runs on the same grid and scheme");
  double worst = 0.0;
  for (int c = 0; c < mesh.interior_cells(); ++c) {
    const auto idx = mesh.unravel(c);
    for (int q = 0; q < basis.volume_points(); ++q) {
      const auto x = mesh.map_to_physical(idx, basis.volume_node(q));
      const double r = std::hypot(x[0], x[1]);
      if (r < ann.r_min || r > ann.r_max) continue;
      const std::span<const double> phi(basis.phi() + q * nm, nm);
      double d = evaluate<2>(field, c, phi)[0];
      if (b) {
        d -= evaluate<2>(b->field, c, phi)[0];
      } else if (!a.is_delta) {
        d -= a.setup.eq.conserved(x)[0];
      }
      worst = std::max(worst, std::abs(d));
    }
  }
  return worst;
}

}  // namespace wbdg
