// Benchmark driver: single runs, convergence and amplitude sweeps, disc runs
// and report tables.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wbdg/config.hpp"
#include "wbdg/runner.hpp"

namespace {

using namespace wbdg;

std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

/// Writes to `dir/name` when a directory is set, and always to stdout.
class CsvSink {
 public:
  CsvSink(const std::string& dir, const std::string& name) {
    if (!dir.empty()) {
      std::filesystem::create_directories(dir);
      path_ = dir + "/" + name;
      file_.open(path_);
      if (!file_) throw std::runtime_error("cannot write " + path_);
    }
  }
  template <class F>
  void write(F&& f) {
    std::ostringstream os;
    f(os);
    std::cout << os.str() << std::flush;
    if (file_) file_ << os.str() << std::flush;
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream file_;
};

int cmd_run(const RunOptions& o) {
  const auto cfg = parse_config(o);
  const auto res = run(cfg);
  CsvSink sink(cfg.output_dir, "report_" + cfg.case_name + "_" + cfg.label() + "_N" + std::to_string(cfg.n) + ".csv");
  sink.write([&](std::ostream& os) {
    write_csv_header(os);
    write_csv_rows(os, res.report);
  });
  std::fprintf(stderr, "%s %s N=%d: %ld steps, loop %.3f s, setup %.3f s\n", cfg.case_name.c_str(),
               cfg.label().c_str(), cfg.n, res.steps, res.report.runtime_s, res.report.setup_s);
  for (const auto& p : res.outputs) std::fprintf(stderr, "wrote %s\n", p.c_str());
  if (!res.report.failure.empty()) {
    std::fprintf(stderr, "run failed: %s\n", res.report.failure.c_str());
    return 2;
  }
  return 0;
}

int cmd_convergence(const RunOptions& o, const std::string& schemes, const std::string& ns) {
  const auto cfg = parse_config(o);
  std::vector<int> nlist;
  for (const auto& s : split(ns)) nlist.push_back(std::stoi(s));
  auto labels = split(schemes);
  if (labels.empty()) {
    labels = {"DG2", "DG3", "DG4", "WBDG2", "WBDG3"};
    if (cfg.case_name == "gresho") labels = {"DG2", "DG3", "WBDG2", "WBDG3"};
  }
  const auto rows = run_convergence(cfg, labels, nlist, [](const ErrorReport& r) {
    std::fprintf(stderr, "%s N=%d done (%.2f s)%s%s\n", r.scheme.c_str(), r.n, r.runtime_s,
                 r.failure.empty() ? "" : " FAILED: ", r.failure.c_str());
  });
  CsvSink sink(cfg.output_dir, "convergence_" + cfg.case_name + ".csv");
  sink.write([&](std::ostream& os) {
    write_csv_header(os);
    for (const auto& r : rows) write_csv_rows(os, r);
  });
  return 0;
}

int cmd_pulse(RunOptions o, const std::string& etas, const std::string& schemes, int reference_n) {
  RunConfig defaults;
  defaults.n = 64;
  const auto cfg = parse_config(o, defaults);
  std::vector<double> elist;
  for (const auto& s : split(etas)) elist.push_back(std::stod(s));
  auto labels = split(schemes);
  const int dims = case_dims(cfg.case_name);
  if (reference_n <= 0) reference_n = dims == 1 ? 512 : 128;
  auto progress = [](const PulseRow& r) {
    std::fprintf(stderr, "%s eta=%.1e: waveform L1 %.3e (pulse mass %.3e)%s%s\n", r.scheme.c_str(), r.eta,
                 r.waveform_l1, r.pulse_mass, r.failure.empty() ? "" : " FAILED: ", r.failure.c_str());
  };
  const auto sweep = dims == 1 ? run_pulse_sweep<1>(cfg, elist, labels, reference_n, progress)
                               : run_pulse_sweep<2>(cfg, elist, labels, reference_n, progress);
  CsvSink sink(cfg.output_dir, "pulse_" + cfg.case_name + ".csv");
  sink.write([&](std::ostream& os) {
    write_pulse_header(os);
    for (const auto& r : sweep.rows) write_pulse_row(os, r);
  });
  return 0;
}

int cmd_disc(RunOptions o) {
  RunConfig defaults;
  defaults.case_name = "disc";
  defaults.scheme = Scheme::WBDG;
  defaults.order = 2;
  defaults.n = 128;
  defaults.eta = 3.1e-6;
  if (!o.case_name) o.case_name = "disc";
  const double rotations = o.rotations.value_or(2.0);
  o.rotations.reset();
  const auto cfg = parse_config(o, defaults);
  const auto zones = *disc().zones;
  const auto ann = clean_annulus(zones);
  const EquilibriumSpec<2> eq = disc();
  std::printf("rotation,time,max_abs_drho_annulus\n");
  const auto res = run_disc(cfg, cfg.eta, rotations, [&](const SolutionField<2>& f, double t, int k) {
    RunResult<2> view{cfg, setup_case<2>(cfg), f};
    view.is_delta = cfg.scheme == Scheme::WBDG;
    std::printf("%d,%.6f,%.6e\n", k, t, max_density_difference(view, nullptr, ann));
    std::fflush(stdout);
  });
  std::fprintf(stderr, "disc %s N=%d eta=%.2e: %ld steps, %.1f s%s%s\n", cfg.label().c_str(), cfg.n, cfg.eta,
               res.steps, res.report.runtime_s, res.report.failure.empty() ? "" : ", FAILED: ",
               res.report.failure.c_str());
  for (const auto& p : res.outputs) std::fprintf(stderr, "wrote %s\n", p.c_str());
  return res.report.failure.empty() ? 0 : 2;
}

/// Re-reads report CSVs, recomputes slopes and prints an aligned table.
int cmd_report(const std::vector<std::string>& files, const std::string& variable) {
  std::vector<ErrorReport> reports;
  for (const auto& path : files) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(is, line);
    if (line.rfind("case,scheme,order,N,variable,l1", 0) != 0) throw std::runtime_error(path + ": not a report CSV");
    while (std::getline(is, line)) {
      std::vector<std::string> f;
      std::stringstream ss(line);
      std::string item;
      while (std::getline(ss, item, ',')) f.push_back(item);
      if (f.size() < 8) continue;
      ErrorReport* r = nullptr;
      for (auto& x : reports)
        if (x.case_name == f[0] && x.scheme == f[1] && x.n == std::stoi(f[3])) r = &x;
      if (!r) {
        reports.emplace_back();
        r = &reports.back();
        r->case_name = f[0];
        r->scheme = f[1];
        r->order = std::stoi(f[2]);
        r->n = std::stoi(f[3]);
        r->runtime_s = std::stod(f[6]);
        r->wb_cache_bytes = std::stoull(f[7]);
      }
      r->variables.push_back(f[4]);
      r->l1.push_back(std::stod(f[5]));
      r->slope.push_back("");
      if (f[5] == "nan") r->failure = "failed";
    }
  }
  attach_slopes(reports);
  std::printf("%-10s %-6s %5s %14s %8s %10s %12s\n", "case", "scheme", "N", ("L1(" + variable + ")").c_str(), "slope",
              "runtime_s", "cache_bytes");
  for (const auto& r : reports) {
    for (std::size_t k = 0; k < r.variables.size(); ++k) {
      if (r.variables[k] != variable) continue;
      std::printf("%-10s %-6s %5d %14.6e %8s %10.3f %12zu\n", r.case_name.c_str(), r.scheme.c_str(), r.n, r.l1[k],
                  r.slope[k].c_str(), r.runtime_s, r.wb_cache_bytes);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Well-balanced and classical RKDG solvers for Euler with gravity");
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run_cmd = app.add_subcommand("run", "single run, report CSV on stdout");
  add_run_options(*run_cmd, run_opt);

  RunOptions conv_opt;
  std::string conv_schemes, conv_ns = "8,16,32,64";
  auto* conv_cmd = app.add_subcommand("sweep-convergence", "errors and slopes over resolutions and schemes");
  add_run_options(*conv_cmd, conv_opt);
  conv_cmd->add_option("--schemes", conv_schemes, "comma list, e.g. DG2,DG3,WBDG2");
  conv_cmd->add_option("--n-list", conv_ns, "comma list of resolutions");

  RunOptions pulse_opt;
  std::string pulse_etas = "1e-2,1e-4,1e-6,1e-8", pulse_schemes = "DG2,DG3,DG4,WBDG2";
  int reference_n = 0;
  auto* pulse_cmd = app.add_subcommand("sweep-pulse", "pressure-pulse capture over amplitudes");
  add_run_options(*pulse_cmd, pulse_opt);
  pulse_cmd->add_option("--etas", pulse_etas, "comma list of pulse amplitudes");
  pulse_cmd->add_option("--schemes", pulse_schemes, "comma list of scheme labels");
  pulse_cmd->add_option("--reference-n", reference_n, "WBDG3 reference resolution (default 512 in 1D, 128 in 2D)");

  RunOptions disc_opt;
  auto* disc_cmd = app.add_subcommand("run-disc", "planet in the disc, one snapshot per rotation");
  add_run_options(*disc_cmd, disc_opt);

  std::vector<std::string> report_files;
  std::string report_var = "rho";
  auto* report_cmd = app.add_subcommand("report", "slope table from report CSVs");
  report_cmd->add_option("files", report_files, "report CSV files")->required();
  report_cmd->add_option("--variable", report_var, "variable column to tabulate");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return cmd_run(run_opt);
    if (*conv_cmd) return cmd_convergence(conv_opt, conv_schemes, conv_ns);
    if (*pulse_cmd) return cmd_pulse(pulse_opt, pulse_etas, pulse_schemes, reference_n);
    if (*disc_cmd) return cmd_disc(disc_opt);
    if (*report_cmd) return cmd_report(report_files, report_var);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
