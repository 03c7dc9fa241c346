#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "wbdg/config.hpp"
#include "wbdg/runner.hpp"
#include "wbdg/snapshot.hpp"

using namespace wbdg;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("wbdg_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

/// Report CSV without the runtime column.
std::string report_without_runtime(const ErrorReport& r) {
  std::ostringstream os;
  write_csv_rows(os, r);
  std::istringstream is(os.str());
  std::string line, out;
  while (std::getline(is, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    for (std::size_t k = 0; k < f.size(); ++k)
      if (k != 6) out += f[k] + ",";
    out += "\n";
  }
  return out;
}

}  // namespace

TEST(ParseConfig, HappyPath) {
  const auto c = parse_config({"--case", "hydro1d", "--scheme", "wbdg", "--order", "2", "--n", "64", "--t-final", "10"});
  EXPECT_EQ(c.case_name, "hydro1d");
  EXPECT_EQ(c.scheme, Scheme::WBDG);
  EXPECT_EQ(c.order, 2);
  EXPECT_EQ(c.n, 64);
  EXPECT_EQ(*c.t_final, 10.0);
  EXPECT_EQ(c.cfl, 0.2);
  EXPECT_EQ(c.label(), "WBDG2");
}

TEST(ParseConfig, LabelCarriesOrder) {
  const auto c = parse_config({"--case", "moving1d", "--scheme", "DG4"});
  EXPECT_EQ(c.scheme, Scheme::DG);
  EXPECT_EQ(c.order, 4);
}

TEST(ParseConfig, GreshoRejectsPerturbation) {
  EXPECT_THROW(parse_config({"--case", "gresho", "--eta", "0.01"}), std::invalid_argument);
}

TEST(ParseConfig, RejectsBadCombinations) {
  EXPECT_THROW(parse_config({"--case", "mars"}), std::invalid_argument);
  EXPECT_THROW(parse_config({"--scheme", "wbdg", "--order", "4"}), std::invalid_argument);
  EXPECT_THROW(parse_config({"--scheme", "dg", "--order", "6"}), std::invalid_argument);
  EXPECT_THROW(parse_config({"--eta", "-1"}), std::invalid_argument);
  EXPECT_THROW(parse_config({"--case", "hydro1d", "--rotations", "2"}), std::invalid_argument);
  EXPECT_THROW(parse_config({"--strategy", "cache"}), std::invalid_argument);
  EXPECT_THROW(parse_config({"--bogus", "1"}), std::invalid_argument);
}

TEST(ParseConfig, FlagOverridesFile) {
  const auto dir = scratch_dir("config");
  const auto path = (dir / "run.json").string();
  {
    std::ofstream os(path);
    os << R"({ "case": "moving1d", "scheme": "WBDG3", "n": 32, "cfl": 0.1 })";
  }
  const auto c = parse_config({"--config", path, "--n", "64"});
  EXPECT_EQ(c.n, 64);
  EXPECT_EQ(c.case_name, "moving1d");
  EXPECT_EQ(c.label(), "WBDG3");
  EXPECT_EQ(c.cfl, 0.1);
}

TEST(ParseConfig, FileRejectsUnknownKeys) {
  const auto dir = scratch_dir("config_bad");
  const auto path = (dir / "run.json").string();
  {
    std::ofstream os(path);
    os << R"({ "case": "hydro1d", "resolution": 32 })";
  }
  EXPECT_THROW(parse_config({"--config", path}), std::invalid_argument);
}

TEST(ParseConfig, EnvironmentOverridesFileButNotFlag) {
  const auto dir = scratch_dir("config_env");
  const auto path = (dir / "run.json").string();
  {
    std::ofstream os(path);
    os << R"({ "output_dir": "from_file" })";
  }
  ::setenv(kOutputDirEnv, "from_env", 1);
  const auto a = parse_config({"--config", path});
  const auto b = parse_config({"--config", path, "--output-dir", "from_flag"});
  ::unsetenv(kOutputDirEnv);
  const auto c = parse_config({"--config", path});
  EXPECT_EQ(a.output_dir, "from_env");
  EXPECT_EQ(b.output_dir, "from_flag");
  EXPECT_EQ(c.output_dir, "from_file");
}

TEST(RunSingle, WellBalancedHydrostatic) {
  RunConfig c;
  c.case_name = "hydro1d";
  c.scheme = Scheme::WBDG;
  c.order = 2;
  c.n = 8;
  const auto r = run(c);
  ASSERT_TRUE(r.report.failure.empty()) << r.report.failure;
  EXPECT_LE(r.report.l1[0], 1e-12);
  EXPECT_LE(r.report.total(), 1e-11);
  EXPECT_GT(r.steps, 0);
}

TEST(RunSingle, ClassicalShowsTruncationError) {
  RunConfig c;
  c.case_name = "hydro1d";
  c.scheme = Scheme::DG;
  c.order = 2;
  c.n = 8;
  c.t_final = 1.0;
  const auto r = run(c);
  ASSERT_TRUE(r.report.failure.empty());
  EXPECT_GT(r.report.l1[0], 1e-8);
}

TEST(RunSingle, DeterministicReports) {
  RunConfig c;
  c.case_name = "moving1d";
  c.scheme = Scheme::DG;
  c.order = 3;
  c.n = 16;
  c.t_final = 0.5;
  c.eta = 1e-3;
  const auto a = run(c);
  const auto b = run(c);
  EXPECT_EQ(report_without_runtime(a.report), report_without_runtime(b.report));
  EXPECT_EQ(a.snapshot.coefficients, b.snapshot.coefficients);
}

TEST(RunSingle, RecomputeAndStoredBitwise) {
  RunConfig c;
  c.case_name = "hydro2d";
  c.scheme = Scheme::WBDG;
  c.order = 2;
  c.n = 8;
  c.eta = 1e-3;
  c.t_final = 0.2;
  c.strategy = CacheStrategy::Recompute;
  const auto rec = run(c);
  c.strategy = CacheStrategy::Stored;
  const auto mem = run(c);
  EXPECT_EQ(rec.snapshot.coefficients, mem.snapshot.coefficients);
  EXPECT_EQ(rec.report.l1, mem.report.l1);
}

TEST(RunSingle, WritesSnapshotsAndSampledCsv) {
  const auto dir = scratch_dir("outputs");
  RunConfig c;
  c.case_name = "hydro1d";
  c.scheme = Scheme::WBDG;
  c.order = 2;
  c.n = 8;
  c.eta = 1e-2;
  c.t_final = 0.2;
  c.output_every = 0.1;
  c.output_dir = dir.string();
  const auto r = run(c);
  ASSERT_TRUE(r.report.failure.empty());
  // t = 0, 0.1, 0.2, each as .snap and .csv.
  EXPECT_EQ(r.outputs.size(), 6u);
  for (const auto& p : r.outputs) EXPECT_TRUE(std::filesystem::exists(p)) << p;
  const auto last = load_snapshot(r.outputs[4]);
  EXPECT_EQ(last.case_name, "hydro1d");
  EXPECT_EQ(last.scheme, "WBDG2");
  EXPECT_TRUE(last.is_delta);
  EXPECT_DOUBLE_EQ(last.time, 0.2);
  EXPECT_EQ(last.coefficients, r.snapshot.coefficients);
  EXPECT_EQ(last.config_hash, config_hash(c));

  std::ifstream csv(r.outputs[5]);
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "x,rho,mx,E,p,drho,dp");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  EXPECT_EQ(rows, 8 * c.samples_per_cell);
}

TEST(Snapshot, RoundTripAndResample) {
  RunConfig c;
  c.case_name = "gresho";
  c.scheme = Scheme::DG;
  c.order = 3;
  c.n = 6;
  c.t_final = 0.01;
  const auto r = run_single<2>(c);
  const auto dir = scratch_dir("snap");
  const auto path = (dir / "g.snap").string();
  save_snapshot(path, r.snapshot());
  const auto s = load_snapshot(path);
  EXPECT_EQ(s.dims, 2);
  EXPECT_EQ(s.n[0], 6);
  EXPECT_EQ(s.n[1], 6);
  EXPECT_EQ(s.order, 3);
  const auto f = to_field<2>(s);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Point<2> x{u(rng), u(rng)};
    const auto a = evaluate_at<2>(r.field, x);
    const auto b = evaluate_at<2>(f, x);
    for (int v = 0; v < 4; ++v) EXPECT_NEAR(a[v], b[v], 1e-15);
  }
}

TEST(Snapshot, RejectsCorruptFiles) {
  std::stringstream bad("NOTASNAPxxxxxxxx");
  EXPECT_THROW(read_snapshot(bad), std::runtime_error);
  Snapshot s;
  s.case_name = "hydro1d";
  s.dims = 1;
  s.n = {4, 1};
  s.degree = 1;
  s.coefficients.assign(4 * 3 * 2, 1.0);
  std::stringstream ok;
  write_snapshot(ok, s);
  auto text = ok.str();
  text.resize(text.size() - 8);
  std::stringstream truncated(text);
  EXPECT_THROW(read_snapshot(truncated), std::runtime_error);
}

TEST(Convergence, FailingRowsDoNotAbortTheSweep) {
  RunConfig c;
  c.case_name = "hydro1d";
  c.t_final = 0.1;
  // DG6 is not a valid label; its rows are recorded as failures.
  const auto rows = run_convergence(c, {"DG6", "WBDG2"}, {8, 16});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_FALSE(rows[0].failure.empty());
  EXPECT_TRUE(rows[2].failure.empty());
  EXPECT_LE(rows[3].total(), 1e-11);
}

TEST(PulseSweep, LargePulseWaveformsAgree) {
  RunConfig c;
  c.case_name = "hydro1d";
  c.n = 32;
  const auto s = run_pulse_sweep<1>(c, {1e-2}, {"DG2", "WBDG2"}, 128);
  ASSERT_EQ(s.rows.size(), 2u);
  for (const auto& r : s.rows) {
    ASSERT_TRUE(r.failure.empty()) << r.failure;
    EXPECT_LT(r.waveform_l1, 0.05 * r.pulse_mass) << r.scheme;
  }
}

TEST(Disc, WellBalancedBackgroundStaysClean) {
  RunConfig c;
  c.scheme = Scheme::WBDG;
  c.order = 2;
  c.n = 32;
  const auto r = run_disc(c, 0.0, 1.0);
  ASSERT_TRUE(r.report.failure.empty()) << r.report.failure;
  const auto ann = clean_annulus(*disc().zones);
  EXPECT_LT(max_density_difference(r, nullptr, ann), 1e-10);
}

TEST(Disc, LimiterAutoThreshold) {
  RunConfig c;
  c.case_name = "disc";
  c.scheme = Scheme::WBDG;
  c.eta = 9.5e-4;
  EXPECT_TRUE(limiter_enabled(c));
  c.eta = 3.1e-6;
  EXPECT_FALSE(limiter_enabled(c));
  c.scheme = Scheme::DG;
  EXPECT_TRUE(limiter_enabled(c));
  c.limiter = LimiterMode::Off;
  EXPECT_FALSE(limiter_enabled(c));
  c.scheme = Scheme::WBDG;
  c.limiter = LimiterMode::On;
  EXPECT_TRUE(limiter_enabled(c));
}

TEST(Disc, ClassicalStartsWithLimiterOnNearVacuumCorners) {
  // The far-field pressure falls to about 8e-11 in the corners.
  RunConfig c;
  c.scheme = Scheme::DG;
  c.order = 2;
  c.n = 32;
  const auto quiet = run_disc(c, 0.0, 0.005);
  EXPECT_TRUE(quiet.report.failure.empty()) << quiet.report.failure;
  const auto heavy = run_disc(c, 1e-3, 0.005);
  EXPECT_TRUE(heavy.report.failure.empty()) << heavy.report.failure;
}
