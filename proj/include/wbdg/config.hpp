#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "wbdg/runner.hpp"

namespace wbdg {

/// Run settings as given on the command line; unset options leave the file
/// or default value in place.
struct RunOptions {
  RunOptions() = default;  // not an aggregate, so braced argument lists pick the vector overload

  std::string config_file;
  std::optional<std::string> case_name, scheme, strategy, limiter, output_dir, tableau;
  std::optional<int> order, n, samples_per_cell, error_points;
  std::optional<double> cfl, eta, t_final, rotations, output_every, limiter_floor;
  std::optional<std::uint64_t> seed;
};

/// Environment variable that overrides the output directory of a config file.
inline constexpr const char* kOutputDirEnv = "WBDG_OUTPUT_DIR";

inline void add_run_options(CLI::App& app, RunOptions& o) {
  app.add_option("--config", o.config_file, "JSON file with run settings (flags take precedence)");
  app.add_option("--case", o.case_name, "hydro1d | hydro2d | moving1d | gresho | disc");
  app.add_option("--scheme", o.scheme, "dg | wbdg, or a label such as DG3 / WBDG2");
  app.add_option("--order", o.order, "formal order Np+1 (DG 2-5, WBDG 2-3)");
  app.add_option("--n", o.n, "cells per axis");
  app.add_option("--cfl", o.cfl, "CFL constant C");
  app.add_option("--eta", o.eta, "pulse amplitude, or planet mass ratio for the disc");
  app.add_option("--t-final", o.t_final, "final time");
  app.add_option("--rotations", o.rotations, "disc: planet rotations to run");
  app.add_option("--strategy", o.strategy, "equilibrium samples: Rec (recompute) | Mem (stored)");
  app.add_option("--limiter", o.limiter, "positivity limiter: auto | on | off");
  app.add_option("--limiter-floor", o.limiter_floor, "positivity floor for density and pressure");
  app.add_option("--output-every", o.output_every, "time between snapshots (0: final only)");
  app.add_option("--output-dir", o.output_dir, "directory for snapshots and CSVs");
  app.add_option("--samples-per-cell", o.samples_per_cell, "plotting samples per cell and axis");
  app.add_option("--seed", o.seed, "reserved");
  app.add_option("--tableau", o.tableau, "override the time integrator (SSP22, SSP33, SSP45)");
  app.add_option("--error-points", o.error_points, "Gauss points per axis of the L1 rule (0: the scheme's own)");
}

namespace detail {

inline void set_scheme(RunConfig& c, const std::string& label, bool order_given) {
  const auto [scheme, order] = parse_scheme(label);
  c.scheme = scheme;
  if (order && !order_given) c.order = *order;
}

}  // namespace detail

/// Applies the keys of a JSON object. Keys mirror the long flags with
/// underscores (case, scheme, order, n, cfl, eta, t_final, rotations,
/// strategy, limiter, limiter_floor, output_every, output_dir,
/// samples_per_cell, seed, tableau, error_points). Unknown keys are rejected.
inline void apply_json(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  const bool order_given = j.contains("order");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "case") {
        c.case_name = value.get<std::string>();
      } else if (key == "scheme") {
        detail::set_scheme(c, value.get<std::string>(), order_given);
      } else if (key == "order") {
        c.order = value.get<int>();
      } else if (key == "n" || key == "N") {
        c.n = value.get<int>();
      } else if (key == "cfl") {
        c.cfl = value.get<double>();
      } else if (key == "eta") {
        c.eta = value.get<double>();
      } else if (key == "t_final") {
        c.t_final = value.get<double>();
      } else if (key == "rotations") {
        c.rotations = value.get<double>();
      } else if (key == "strategy") {
        c.strategy = parse_strategy(value.get<std::string>());
      } else if (key == "limiter") {
        c.limiter = value.is_boolean() ? (value.get<bool>() ? LimiterMode::On : LimiterMode::Off)
                                       : parse_limiter(value.get<std::string>());
      } else if (key == "limiter_floor") {
        c.limiter_floor = value.get<double>();
      } else if (key == "output_every") {
        c.output_every = value.get<double>();
      } else if (key == "output_dir") {
        c.output_dir = value.get<std::string>();
      } else if (key == "samples_per_cell") {
        c.samples_per_cell = value.get<int>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "error_points") {
        c.error_points = value.get<int>();
      } else if (key == "tableau") {
        c.tableau = value.get<std::string>();
      } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config key '" + key + "': " + e.what());
    }
  }
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file " + path);
  try {
    return nlohmann::json::parse(is, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config file " + path + ": " + e.what());
  }
}

/// Defaults, then the config file, then WBDG_OUTPUT_DIR, then explicit flags.
/// The result is validated.
inline RunConfig parse_config(const RunOptions& o, RunConfig defaults = {}) {
  RunConfig c = std::move(defaults);
  if (!o.config_file.empty()) apply_json(c, read_json_file(o.config_file));
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) c.output_dir = env;
  if (o.case_name) c.case_name = *o.case_name;
  if (o.scheme) detail::set_scheme(c, *o.scheme, o.order.has_value());
  if (o.order) c.order = *o.order;
  if (o.n) c.n = *o.n;
  if (o.cfl) c.cfl = *o.cfl;
  if (o.eta) c.eta = *o.eta;
  if (o.t_final) {
    c.t_final = *o.t_final;
    c.rotations.reset();
  }
  if (o.rotations) {
    c.rotations = *o.rotations;
    c.t_final.reset();
  }
  if (o.strategy) c.strategy = parse_strategy(*o.strategy);
  if (o.limiter) c.limiter = parse_limiter(*o.limiter);
  if (o.limiter_floor) c.limiter_floor = *o.limiter_floor;
  if (o.output_every) c.output_every = *o.output_every;
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.samples_per_cell) c.samples_per_cell = *o.samples_per_cell;
  if (o.seed) c.seed = *o.seed;
  if (o.tableau) c.tableau = *o.tableau;
  if (o.error_points) c.error_points = *o.error_points;
  validate(c);
  return c;
}

/// Parses `run`-style arguments (without the program name).
inline RunConfig parse_config(std::vector<std::string> args, RunConfig defaults = {}) {
  CLI::App app("wbdg run");
  RunOptions o;
  add_run_options(app, o);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    throw std::invalid_argument(std::string("bad arguments: ") + e.what());
  }
  return parse_config(o, std::move(defaults));
}

}  // namespace wbdg
