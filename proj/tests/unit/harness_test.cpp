#include "blowuplab/config.hpp"
#include "blowuplab/error.hpp"
#include "blowuplab/experiment.hpp"
#include "blowuplab/io.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace blowuplab {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name)
{
  const fs::path dir = fs::temp_directory_path() / ("blowuplab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& path, const std::string& text)
{
  std::ofstream(path) << text;
  return path;
}

std::string quoted(const fs::path& p) { return "\"" + p.generic_string() + "\""; }

TEST(Config, DefaultsFileThenOverrides)
{
  const fs::path dir = scratch_dir("precedence");
  const fs::path file = write_file(dir / "c.toml", R"(
[problem]
p = 3.0
[mesh]
cells_x = 50
[initial]
amplitude = 2.0
)");
  const RunConfig defaults = load_config(std::nullopt);
  EXPECT_EQ(defaults.cells_x, 200);
  EXPECT_DOUBLE_EQ(defaults.problem.p, 4.0);

  const RunConfig from_file = load_config(file);
  EXPECT_DOUBLE_EQ(from_file.problem.p, 3.0);
  EXPECT_EQ(from_file.cells_x, 50);
  EXPECT_DOUBLE_EQ(from_file.initial.spec.amplitude, 2.0);
  EXPECT_DOUBLE_EQ(from_file.integrator.horizon, defaults.integrator.horizon);

  const RunConfig cli = load_config(file, {{"problem.p", "5"}, {"integrator.horizon", "2.5"}});
  EXPECT_DOUBLE_EQ(cli.problem.p, 5.0);
  EXPECT_DOUBLE_EQ(cli.integrator.horizon, 2.5);
  EXPECT_EQ(cli.cells_x, 50);

  const RunConfig more = with_overrides(cli, {{"mesh.cells_x", "80"}});
  EXPECT_EQ(more.cells_x, 80);
  EXPECT_DOUBLE_EQ(more.problem.p, 5.0);
}

TEST(Config, TomlRoundTrip)
{
  const fs::path dir = scratch_dir("roundtrip");
  RunConfig cfg = load_config(std::nullopt, {{"problem.p", "3.5"}, {"initial.family", "\"bump\""},
                                             {"sweep.parameter", "\"initial.amplitude\""},
                                             {"sweep.values", "[1.0, 2.0]"}});
  const std::string text = to_toml(cfg);
  const RunConfig back = load_config(write_file(dir / "back.toml", text));
  EXPECT_EQ(to_toml(back), text);
  EXPECT_EQ(back.initial.spec.family, Family::Bump);
  ASSERT_TRUE(back.sweep.has_value());
  EXPECT_EQ(back.sweep->values, (std::vector<double>{1.0, 2.0}));
}

TEST(Config, ErrorKinds)
{
  const fs::path dir = scratch_dir("errors");
  EXPECT_ERROR_KIND(load_config(dir / "missing.toml"), ErrorKind::Io);
  EXPECT_ERROR_KIND(load_config(write_file(dir / "bad.toml", "[problem\np = ")), ErrorKind::Config);
  EXPECT_ERROR_KIND(load_config(write_file(dir / "unknown.toml", "[problem]\nq = 1\n")), ErrorKind::Config);
  EXPECT_ERROR_KIND(load_config(std::nullopt, {{"problem.p", "\"four\""}}), ErrorKind::Config);
  EXPECT_ERROR_KIND(load_config(std::nullopt, {{"mesh.cells_x", "0"}}), ErrorKind::Config);
  EXPECT_ERROR_KIND(parse_override("no-equals"), ErrorKind::Usage);
  EXPECT_EQ(parse_override("a.b=3"), (Override{"a.b", "3"}));
}

TEST(Config, WorkerLimitFromEnvironment)
{
  ::setenv("BLOWUPLAB_THREADS", "3", 1);
  EXPECT_EQ(worker_limit(), 3);
  ::setenv("BLOWUPLAB_THREADS", "zero", 1);
  EXPECT_ERROR_KIND(worker_limit(), ErrorKind::Config);
  ::unsetenv("BLOWUPLAB_THREADS");
  EXPECT_GE(worker_limit(), 1);
}

TEST(Io, FieldJsonRoundTrip)
{
  const auto ops = testing::unit_interval(30, 4.0);
  Field u = testing::ramp(ops, 1.0 / 3.0);
  u.time = 0.125L;
  const Json j = field_to_json(u, ops.mesh());
  const Field back = field_from_json(Json::parse(dump(j)), ops.mesh());
  EXPECT_EQ((back.values - u.values).norm(), 0.0);
  EXPECT_EQ(back.time, u.time);

  const auto other = testing::unit_interval(31, 4.0);
  EXPECT_ERROR_KIND(field_from_json(j, other.mesh()), ErrorKind::Io);
}

TEST(Io, FormatDoubleRoundTrips)
{
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(Io, UnwritablePathIsIoError)
{
  const fs::path dir = scratch_dir("unwritable");
  write_file(dir / "file", "x");
  EXPECT_ERROR_KIND(write_text(dir / "file" / "sub" / "a.txt", "y"), ErrorKind::Io);
}

RunConfig small_run(const fs::path& out)
{
  return load_config(std::nullopt, {{"mesh.cells_x", "100"},
                                    {"initial.amplitude", "3"},
                                    {"estimator.richardson", "false"},
                                    {"integrator.tol_growth", "0.01"},
                                    {"run.output_dir", quoted(out)}});
}

TEST(Experiment, EndToEndRampRun)
{
  const fs::path dir = scratch_dir("e2e");
  const auto r = run_experiment(small_run(dir));
  EXPECT_EQ(r.exit_code, kExitOk);
  for (const char* f : {"config.toml", "constants.json", "u0.json", "verdict.json", "trajectory.csv", "plot.gp"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_FALSE(fs::exists(dir / "operators.json"));
  const Json verdict = Json::parse(read_text(dir / "verdict.json"));
  EXPECT_EQ(verdict["verdict"]["status"], "blown_up");
  ASSERT_TRUE(r.sandwich_ok.has_value());
  EXPECT_TRUE(*r.sandwich_ok);
  const double T = verdict["verdict"]["T_est"].get<double>();
  EXPECT_LE(T, verdict["verdict"]["T_upper_B1"].get<double>());
  EXPECT_LE(T, verdict["verdict"]["T_upper_B2"].get<double>());
}

TEST(Experiment, DumpOperators)
{
  const fs::path dir = scratch_dir("dump");
  auto cfg = with_overrides(small_run(dir), {{"run.dump_operators", "true"}, {"run.simulate", "false"}});
  const auto r = run_experiment(cfg);
  EXPECT_EQ(r.exit_code, kExitOk);
  const Json ops = Json::parse(read_text(dir / "operators.json"));
  for (const char* key : {"mesh", "mass", "stiffness", "boundary_mass"}) {
    EXPECT_TRUE(ops.contains(key)) << key;
  }
}

TEST(Experiment, ZeroHorizonExitsOk)
{
  const fs::path dir = scratch_dir("horizon0");
  const auto r = run_experiment(with_overrides(small_run(dir), {{"integrator.horizon", "0"}}));
  EXPECT_EQ(r.exit_code, kExitOk);
  ASSERT_TRUE(r.status().has_value());
  EXPECT_EQ(*r.status(), BlowupStatus::GlobalOnHorizon);
  EXPECT_EQ(r.simulation->trajectory.size(), 1u);
}

TEST(Experiment, UnwritableOutputExitsOne)
{
  const fs::path dir = scratch_dir("blocked");
  write_file(dir / "file", "x");
  const auto r = run_experiment(small_run(dir / "file" / "out"));
  EXPECT_EQ(r.exit_code, kExitIoConfig);
  EXPECT_FALSE(r.errors.empty());
}

TEST(Experiment, ExitCodeMapping)
{
  EXPECT_EQ(exit_code_for(ErrorKind::Io), kExitIoConfig);
  EXPECT_EQ(exit_code_for(ErrorKind::Config), kExitIoConfig);
  EXPECT_EQ(exit_code_for(ErrorKind::Usage), kExitIoConfig);
  EXPECT_EQ(exit_code_for(ErrorKind::Convergence), kExitInconclusive);
  EXPECT_EQ(exit_code_for(ErrorKind::InconclusiveEstimate), kExitInconclusive);
}

TEST(Sweep, EmptyAxisIsUsageError)
{
  const fs::path dir = scratch_dir("empty_axis");
  EXPECT_ERROR_KIND(run_sweep(small_run(dir), SweepAxis{"initial.amplitude", {}}), ErrorKind::Usage);
}

TEST(Sweep, AmplitudeSweepIsDeterministic)
{
  const fs::path a = scratch_dir("sweep_a");
  const fs::path b = scratch_dir("sweep_b");
  const SweepAxis axis{"initial.amplitude", {2.5, 3.0, 4.0, 6.0}};
  SweepOptions parallel;
  parallel.threads = 4;
  SweepOptions serial;
  serial.threads = 1;
  const auto ra = run_sweep(small_run(a), axis, parallel);
  const auto rb = run_sweep(small_run(b), axis, serial);
  ASSERT_EQ(ra.rows.size(), 4u);
  EXPECT_EQ(ra.exit_code, kExitOk);
  EXPECT_EQ(read_text(a / "sweep_summary.csv"), read_text(b / "sweep_summary.csv"));
  for (const auto& row : ra.rows) {
    EXPECT_EQ(row.status, "blown_up");
  }
}

}  // namespace
}  // namespace blowuplab
