// Command-line front end: blowuplab <subcommand> [config.toml] [options]

#include "blowuplab/config.hpp"
#include "blowuplab/experiment.hpp"
#include "blowuplab/io.hpp"
#include "blowuplab/verification.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace blowuplab;

/// Options shared by every experiment-style subcommand.
struct CommonOptions {
  std::string config;
  std::vector<std::string> sets;
  std::optional<double> p;
  std::optional<int> cells;
  std::optional<double> amplitude;
  std::optional<std::string> family;
  std::optional<double> horizon;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool dump_operators = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool out_is_dir = true)
{
  cmd->add_option("config", o.config, "TOML config file")->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", o.sets, "Override a config key, e.g. -s integrator.horizon=2");
  cmd->add_option("--p", o.p, "Source exponent");
  cmd->add_option("--cells,--mesh", o.cells, "Cells along x");
  cmd->add_option("--amplitude", o.amplitude, "Initial-data amplitude");
  cmd->add_option("--family", o.family, "ramp, bump, eigenmode, oscillatory or two_bump");
  cmd->add_option("--horizon", o.horizon, "Final time");
  cmd->add_option("--tol", o.tol, "Target relative change per step");
  cmd->add_option("--seed", o.seed, "Run seed");
  cmd->add_option("-o,--out", o.out, out_is_dir ? "Output directory" : "Output field file");
  cmd->add_flag("--dump-operators", o.dump_operators, "Write the assembled operators to operators.json");
}

std::string quoted(const std::string& text) { return "\"" + text + "\""; }

RunConfig build_config(const CommonOptions& o, std::vector<Override> extra = {})
{
  std::vector<Override> overrides;
  for (const auto& s : o.sets) {
    overrides.push_back(parse_override(s));
  }
  auto add = [&](const char* key, const std::string& value) { overrides.emplace_back(key, value); };
  if (o.p) {
    add("problem.p", format_double(*o.p));
  }
  if (o.cells) {
    add("mesh.cells_x", std::to_string(*o.cells));
  }
  if (o.amplitude) {
    add("initial.amplitude", format_double(*o.amplitude));
  }
  if (o.family) {
    add("initial.kind", quoted("family"));
    add("initial.family", quoted(*o.family));
  }
  if (o.horizon) {
    add("integrator.horizon", format_double(*o.horizon));
  }
  if (o.tol) {
    add("integrator.tol_growth", format_double(*o.tol));
  }
  if (o.seed) {
    add("run.seed", std::to_string(*o.seed));
  }
  if (o.out) {
    add("run.output_dir", quoted(*o.out));
  }
  if (o.dump_operators) {
    add("run.dump_operators", "true");
  }
  overrides.insert(overrides.end(), extra.begin(), extra.end());
  std::optional<std::filesystem::path> file;
  if (!o.config.empty()) {
    file = o.config;
  }
  return load_config(file, overrides);
}

void report_errors(const ExperimentReport& r)
{
  for (const auto& e : r.errors) {
    std::cerr << "error: " << e << '\n';
  }
}

Json bounds_json(const ExperimentReport& r)
{
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"upper_B1", opt(r.bounds.upper_B1)},
              {"upper_B2", opt(r.bounds.upper_B2)},
              {"lower", opt(r.bounds.lower)},
              {"notes", r.bounds.notes}};
}

int run_stage(const CommonOptions& o, Stage stage, const char* what)
{
  const RunConfig cfg = build_config(o);
  ExperimentOptions eo;
  eo.last_stage = stage;
  const ExperimentReport r = run_experiment(cfg, eo);
  report_errors(r);
  const std::string key(what);
  if (key == "constants" && r.constants) {
    std::cout << dump(to_json(*r.constants));
  } else if (key == "classify" && r.classification) {
    std::cout << dump(to_json(*r.classification));
  } else if (key == "bounds") {
    Json j = bounds_json(r);
    j["classification"] = r.classification ? to_json(*r.classification) : Json(nullptr);
    std::cout << dump(j);
  } else if (key == "simulate" || key == "audit") {
    std::cout << dump(verdict_json(r));
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Blow-up laboratory for u_t - Lap u = |u|^{p-2} u with a dynamic boundary condition"};
  app.require_subcommand(1);

  CommonOptions constants_opts;
  CommonOptions simulate_opts;
  CommonOptions classify_opts;
  CommonOptions bounds_opts;
  CommonOptions construct_opts;
  CommonOptions audit_opts;
  CommonOptions sweep_opts;

  auto* constants_cmd = app.add_subcommand("constants", "Estimate S1, S2, B1, S3 and the derived constants");
  add_common(constants_cmd, constants_opts);
  auto* simulate_cmd = app.add_subcommand("simulate", "Full pipeline: constants, u0, classify, bounds, simulate");
  add_common(simulate_cmd, simulate_opts);
  auto* classify_cmd = app.add_subcommand("classify", "Blow-up set membership of u0");
  add_common(classify_cmd, classify_opts);
  auto* bounds_cmd = app.add_subcommand("bounds", "Upper and lower blow-up time bounds for u0");
  add_common(bounds_cmd, bounds_opts);

  auto* construct_cmd = app.add_subcommand("construct-u0", "Build u0 in B2 with a prescribed energy");
  add_common(construct_cmd, construct_opts, false);
  double energy = 0.0;
  construct_cmd->add_option("--energy", energy, "Target energy J(u0)")->required();

  auto* audit_cmd = app.add_subcommand("audit", "Simulate and run the invariance and concavity audits");
  add_common(audit_cmd, audit_opts);

  auto* sweep_cmd = app.add_subcommand("sweep", "One experiment per parameter value");
  add_common(sweep_cmd, sweep_opts);
  std::string param;
  std::vector<double> values;
  int sweep_threads = 0;
  sweep_cmd->add_option("--param", param, "Dotted config key, e.g. initial.amplitude");
  sweep_cmd->add_option("--values", values, "Comma-separated values")->delimiter(',');
  sweep_cmd->add_option("--threads", sweep_threads, "Worker cap (default BLOWUPLAB_THREADS or all cores)");

  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance invariant suite");
  std::vector<int> only;
  std::string work_dir = "verify_out";
  std::string config_dir;
  int verify_threads = 0;
  verify_cmd->add_option("--only", only, "Criterion ids, e.g. 1,7,13")->delimiter(',');
  verify_cmd->add_option("--work-dir", work_dir, "Output root");
  verify_cmd->add_option("--config-dir", config_dir, "Directory with the scenario configs");
  verify_cmd->add_option("--threads", verify_threads, "Worker cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIoConfig;
  }

  try {
    if (*constants_cmd) {
      return run_stage(constants_opts, Stage::Constants, "constants");
    }
    if (*simulate_cmd) {
      return run_stage(simulate_opts, Stage::Simulate, "simulate");
    }
    if (*classify_cmd) {
      return run_stage(classify_opts, Stage::Classify, "classify");
    }
    if (*bounds_cmd) {
      return run_stage(bounds_opts, Stage::Bounds, "bounds");
    }
    if (*construct_cmd) {
      std::optional<std::string> field_out = construct_opts.out;
      construct_opts.out.reset();
      const RunConfig cfg = build_config(construct_opts, {{"initial.kind", quoted("energy_level")},
                                                          {"initial.target_energy", format_double(energy)}});
      ExperimentOptions eo;
      eo.last_stage = Stage::Classify;
      const ExperimentReport r = run_experiment(cfg, eo);
      report_errors(r);
      if (r.construction) {
        if (field_out) {
          write_text(*field_out, dump(field_to_json(*r.u0, r.ops->mesh())));
        }
        std::cout << dump(to_json(*r.construction));
      }
      return r.exit_code;
    }
    if (*audit_cmd) {
      const RunConfig cfg = build_config(audit_opts, {{"run.audits", "true"}, {"run.concavity", "true"}});
      const ExperimentReport r = run_experiment(cfg);
      report_errors(r);
      Json j{{"audit", r.audit ? to_json(*r.audit) : Json(nullptr)},
             {"concavity", r.concavity ? to_json(*r.concavity) : Json(nullptr)},
             {"identity_residuals", r.residuals ? to_json(*r.residuals) : Json(nullptr)},
             {"exit_code", r.exit_code}};
      std::cout << dump(j);
      return r.exit_code;
    }
    if (*sweep_cmd) {
      const RunConfig cfg = build_config(sweep_opts);
      SweepAxis axis = cfg.sweep.value_or(SweepAxis{});
      if (!param.empty()) {
        axis.parameter = param;
      }
      if (!values.empty()) {
        axis.values = values;
      }
      SweepOptions so;
      so.threads = sweep_threads;
      const SweepReport s = run_sweep(cfg, axis, so);
      std::cout << s.csv;
      return s.exit_code;
    }
    if (*verify_cmd) {
      VerificationOptions vo;
      vo.work_dir = work_dir;
      vo.only = only;
      vo.threads = verify_threads;
      if (!config_dir.empty()) {
        vo.config_dir = config_dir;
      }
      bool all = true;
      run_verification(vo, [&](const CriterionResult& r) {
        all = all && r.passed;
        std::cout << format_result(r) << std::endl;
      });
      return all ? kExitOk : kExitInvariant;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInconclusive;
  }
  return kExitOk;
}
