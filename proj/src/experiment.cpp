#include "blowuplab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace blowuplab {
namespace {

/// Exit codes in decreasing severity: 1, then 3, then 2.
void raise_exit(int& current, int code)
{
  if (code == kExitOk || current == kExitIoConfig) {
    return;
  }
  if (current == kExitOk || code == kExitIoConfig || (code == kExitInvariant && current == kExitInconclusive)) {
    current = code;
  }
}

/// Uniform draw in [0, 1) tied to a run seed, independent of the field coefficients.
double seeded_fraction(std::uint64_t seed)
{
  std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string toml_string(const std::string& text)
{
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') {
      out += '\\';
    }
    out += c;
  }
  return out + "\"";
}

std::string csv_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string run_label(std::size_t index)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%03zu", index);
  return buf;
}

/// Runs body(i) for i in [0, n) on up to `workers` threads. body must not throw.
template <typename Body>
void parallel_for(std::size_t n, int workers, const Body& body)
{
  const std::size_t count = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  if (count <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        body(i);
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
}

class Pipeline {
public:
  Pipeline(const RunConfig& cfg, const ExperimentOptions& opts) : cfg_(cfg), opts_(opts) { report_.config = cfg; }

  ExperimentReport run()
  {
    const bool ok = stage("config", [&] { cfg_.validate(); }) && stage("operators", [&] { build_operators(); }) &&
                    stage("constants", [&] { constants(); });
    if (ok && opts_.last_stage >= Stage::InitialData && stage("initial data", [&] { initial_data(); })) {
      if (opts_.last_stage >= Stage::Classify && p() > 2.0) {
        stage("classify", [&] { report_.classification = classify_initial(*report_.u0, consts(), ops(), p()); });
      }
      if (opts_.last_stage >= Stage::Bounds && cfg_.bounds) {
        stage("bounds", [&] { bounds(); });
      }
      if (opts_.last_stage >= Stage::Simulate && cfg_.simulate) {
        if (stage("simulate", [&] { simulate_run(); })) {
          post_process();
        }
      }
    }
    if (opts_.write_files) {
      stage("write", [&] { write(); });
    }
    return std::move(report_);
  }

private:
  template <typename F>
  bool stage(const char* name, const F& body)
  {
    try {
      body();
      return true;
    } catch (const Error& e) {
      report_.errors.push_back(std::string(name) + ": " + to_string(e.kind()) + ": " + e.what());
      raise_exit(report_.exit_code, exit_code_for(e.kind()));
    } catch (const std::exception& e) {
      report_.errors.push_back(std::string(name) + ": " + e.what());
      raise_exit(report_.exit_code, kExitInconclusive);
    }
    return false;
  }

  [[nodiscard]] double p() const { return cfg_.problem.p; }
  [[nodiscard]] const DiscreteOperators& ops() const { return *report_.ops; }
  [[nodiscard]] const SobolevConstants& consts() const { return *report_.constants; }

  void build_operators()
  {
    const Mesh mesh = build_mesh(cfg_.problem, cfg_.cells_x, cfg_.cells_y);
    report_.ops = std::make_shared<const DiscreteOperators>(assemble_operators(mesh, cfg_.problem));
  }

  void constants()
  {
    if (opts_.constants) {
      require(opts_.constants->p == p() && opts_.constants->n == cfg_.problem.dim, ErrorKind::Precondition,
              "supplied constants belong to a different problem");
      report_.constants = opts_.constants;
    } else {
      report_.constants = estimate_constants(ops(), cfg_.estimator);
    }
  }

  void initial_data()
  {
    const InitialConfig& in = cfg_.initial;
    switch (in.kind) {
      case InitialKind::Family:
        report_.u0 = make_field(in.spec, ops());
        break;
      case InitialKind::EnergyLevel: {
        EnergyConstruction c =
            construct_energy_level(in.target_energy, consts(), ops(), p(), in.spec.omega1, in.spec.omega2);
        report_.u0 = c.u0;
        report_.construction = std::move(c);
        break;
      }
      case InitialKind::RandomB1: {
        const Field w = random_smooth_field(ops(), cfg_.seed, in.random_modes);
        report_.u0 = scale_into_B1(w, consts(), ops(), p(), in.level.value_or(0.9 * seeded_fraction(cfg_.seed)));
        break;
      }
      case InitialKind::RandomB2: {
        const Field w = random_smooth_field(ops(), cfg_.seed, in.random_modes);
        report_.u0 =
            scale_into_B2(w, consts(), ops(), p(), in.level.value_or(1.5 + 2.5 * seeded_fraction(cfg_.seed)));
        break;
      }
      case InitialKind::File: {
        Json j;
        try {
          j = Json::parse(read_text(in.path));
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorKind::Io, in.path.string() + ": " + e.what());
        }
        report_.u0 = field_from_json(j, ops().mesh());
        break;
      }
    }
    report_.u0->time = 0;
    require_admissible(*report_.u0, ops());
  }

  template <typename F>
  std::optional<double> optional_bound(const F& compute)
  {
    try {
      return compute();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotApplicable) {
        throw;
      }
      report_.bounds.notes.emplace_back(e.what());
      return std::nullopt;
    }
  }

  void bounds()
  {
    if (p() <= 2.0) {
      report_.bounds.notes.emplace_back("bounds need p > 2");
      return;
    }
    const Field& u0 = *report_.u0;
    report_.bounds.upper_B1 = optional_bound([&] { return upper_bound_T(u0, consts(), ops(), p(), BlowupSet::B1); });
    report_.bounds.upper_B2 = optional_bound([&] { return upper_bound_T(u0, consts(), ops(), p(), BlowupSet::B2); });
    report_.bounds.lower = optional_bound([&] { return lower_bound_T(u0, consts(), ops(), p(), cfg_.problem.dim); });
  }

  void simulate_run()
  {
    std::optional<double> A;
    if (p() > 2.0) {
      A = consts().A();
    }
    report_.simulation = simulate(*report_.u0, cfg_.integrator, ops(), p(), A);
    BlowupVerdict& v = report_.simulation->verdict;
    v.T_upper_B1 = report_.bounds.upper_B1;
    v.T_upper_B2 = report_.bounds.upper_B2;
    v.T_lower = report_.bounds.lower;
  }

  void post_process()
  {
    SimulationResult& sim = *report_.simulation;
    BlowupVerdict& v = sim.verdict;
    const TrajectoryRecord& traj = sim.trajectory;
    if (traj.size() >= 2) {
      stage("residuals", [&] { report_.residuals = identity_residuals(traj, ops(), p()); });
    }
    if (p() > 2.0 && cfg_.audits) {
      stage("audit", [&] {
        report_.audit = invariance_audit(traj, consts(), ops(), p(), v.status);
        v.audit_clean = report_.audit->clean();
        for (const auto& f : report_.audit->violations) {
          v.audit_findings.push_back(f.check + " at record " + std::to_string(f.index) + ": " + f.detail);
        }
        if (!report_.audit->clean()) {
          raise_exit(report_.exit_code, kExitInvariant);
        }
      });
    }
    if (p() > 2.0 && cfg_.concavity && traj.size() >= 3 && report_.classification) {
      stage("concavity", [&] { concavity(); });
    }
    sandwich();
    if (v.status == BlowupStatus::Inconclusive) {
      raise_exit(report_.exit_code, kExitInconclusive);
    }
  }

  void concavity()
  {
    const Classification& c = *report_.classification;
    const TrajectoryRecord& traj = report_.simulation->trajectory;
    const EnergyReport& first = traj.reports.front();
    double beta = 0.0;
    if (c.in_B1) {
      beta = p() * (consts().d() - c.J) / (p() - 1.0);
    } else if (c.in_B2 && first.H && *first.H > 0.0) {
      beta = p() * *first.H / (consts().A() * (p() - 1.0));
    } else {
      return;
    }
    if (!(first.rho > 0.0)) {
      return;
    }
    const double sigma = optimal_sigma(first.rho, p(), beta);
    report_.concavity = concavity_monitor(traj, consts(), beta, sigma, traj.reports.back().t);
    if (report_.concavity->hypothesis_met && !report_.concavity->all_inequalities_hold) {
      report_.simulation->verdict.audit_findings.push_back("concavity inequality violated at record " +
                                                           std::to_string(*report_.concavity->first_violation));
      raise_exit(report_.exit_code, kExitInvariant);
    }
  }

  void sandwich()
  {
    const BlowupVerdict& v = report_.simulation->verdict;
    if (v.status != BlowupStatus::BlownUp || !v.T_est) {
      return;
    }
    const double T = static_cast<double>(*v.T_est);
    const BoundsReport& b = report_.bounds;
    std::optional<bool> ok;
    auto check = [&](bool holds) { ok = ok.value_or(true) && holds; };
    for (const auto& upper : {b.upper_B1, b.upper_B2}) {
      if (upper) {
        check(T <= kUpperSlack * *upper);
      }
    }
    if (b.lower && report_.audit && report_.audit->n_minus_persistent) {
      check(T >= kLowerSlack * *b.lower);
    }
    report_.sandwich_ok = ok;
    if (ok && !*ok) {
      report_.simulation->verdict.audit_findings.emplace_back("blow-up time outside the bound sandwich");
      raise_exit(report_.exit_code, kExitInvariant);
    }
  }

  void put(const std::string& name, const std::string& content)
  {
    const std::filesystem::path path = cfg_.output_dir / name;
    write_text(path, content);
    report_.files.push_back(path);
  }

  void write()
  {
    put("config.toml", to_toml(cfg_));
    if (report_.ops && cfg_.dump_operators) {
      put("operators.json", dump(operators_to_json(ops())));
    }
    if (report_.constants) {
      put("constants.json", dump(to_json(consts())));
    }
    if (report_.u0) {
      put("u0.json", dump(field_to_json(*report_.u0, ops().mesh())));
    }
    if (report_.simulation) {
      put("trajectory.csv", trajectory_csv(report_.simulation->trajectory));
      put("plot.gp", plot_script("trajectory.csv", report_.simulation->verdict, cfg_.name));
    }
    // Written last so it records every earlier stage, including write failures above.
    put("verdict.json", dump(verdict_json(report_)));
  }

  const RunConfig& cfg_;
  const ExperimentOptions& opts_;
  ExperimentReport report_;
};

SweepRow make_row(std::size_t index, double value, const ExperimentReport& r)
{
  SweepRow row;
  row.index = index;
  row.value = value;
  row.exit_code = r.exit_code;
  const auto status = r.status();
  row.status = status ? to_string(*status) : "failed";
  if (r.classification) {
    const Classification& c = *r.classification;
    row.J0 = c.J;
    row.K0 = c.K;
    std::vector<std::string> flags;
    if (c.in_B1) {
      flags.emplace_back("B1");
    }
    if (c.in_B2) {
      flags.emplace_back("B2");
    }
    if (c.in_N_minus) {
      flags.emplace_back("N-");
    }
    for (std::size_t i = 0; i < flags.size(); ++i) {
      row.flags += (i ? "+" : "") + flags[i];
    }
  }
  if (r.simulation && r.simulation->verdict.T_est) {
    row.T_est = static_cast<double>(*r.simulation->verdict.T_est);
  }
  row.T_upper = r.bounds.upper();
  row.T_lower = r.bounds.lower;
  row.sandwich_ok = r.sandwich_ok;
  for (std::size_t i = 0; i < r.errors.size(); ++i) {
    row.error += (i ? "; " : "") + r.errors[i];
  }
  return row;
}

std::string csv_field(const std::string& text)
{
  if (text.find_first_of(",\"\n") == std::string::npos) {
    return text;
  }
  std::string out = "\"";
  for (char c : text) {
    out += c == '"' ? std::string("\"\"") : std::string(1, c);
  }
  return out + "\"";
}

std::string summary_csv(const std::vector<SweepRow>& rows)
{
  std::ostringstream os;
  os << "index,param,J0,K0,flags,T_est,T_upper,T_lower,sandwich_ok,status,error\n";
  for (const SweepRow& r : rows) {
    os << r.index << ',' << format_double(r.value) << ',' << csv_optional(r.J0) << ',' << csv_optional(r.K0) << ','
       << r.flags << ',' << csv_optional(r.T_est) << ',' << csv_optional(r.T_upper) << ','
       << csv_optional(r.T_lower) << ',' << (r.sandwich_ok ? (*r.sandwich_ok ? "true" : "false") : "") << ','
       << r.status << ',' << csv_field(r.error) << '\n';
  }
  return os.str();
}

}  // namespace

int exit_code_for(ErrorKind kind)
{
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::Config:
    case ErrorKind::Usage:
    case ErrorKind::InvalidProblem:
    case ErrorKind::InvalidMesh:
    case ErrorKind::InvalidPartition:
    case ErrorKind::Placement:
    case ErrorKind::Construction:
      return kExitIoConfig;
    default:
      return kExitInconclusive;
  }
}

std::optional<double> BoundsReport::upper() const
{
  if (upper_B1 && upper_B2) {
    return std::min(*upper_B1, *upper_B2);
  }
  return upper_B1 ? upper_B1 : upper_B2;
}

std::optional<BlowupStatus> ExperimentReport::status() const
{
  if (!simulation) {
    return std::nullopt;
  }
  return simulation->verdict.status;
}

ExperimentReport run_experiment(const RunConfig& cfg, const ExperimentOptions& opts)
{
  return Pipeline(cfg, opts).run();
}

Json verdict_json(const ExperimentReport& r)
{
  const RunConfig& cfg = r.config;
  Json j{{"name", cfg.name}, {"problem", cfg.problem.describe()}};
  j["mesh"] = r.ops ? Json(r.ops->mesh().fingerprint()) : Json(nullptr);
  j["seed"] = cfg.seed;
  j["initial_kind"] = to_string(cfg.initial.kind);
  j["exit_code"] = r.exit_code;
  j["errors"] = r.errors;
  j["construction"] = r.construction ? to_json(*r.construction) : Json(nullptr);
  j["classification"] = r.classification ? to_json(*r.classification) : Json(nullptr);
  j["bounds"] = Json{{"upper_B1", r.bounds.upper_B1 ? Json(*r.bounds.upper_B1) : Json(nullptr)},
                     {"upper_B2", r.bounds.upper_B2 ? Json(*r.bounds.upper_B2) : Json(nullptr)},
                     {"lower", r.bounds.lower ? Json(*r.bounds.lower) : Json(nullptr)},
                     {"notes", r.bounds.notes}};
  j["verdict"] = r.simulation ? to_json(r.simulation->verdict) : Json(nullptr);
  j["sandwich_ok"] = r.sandwich_ok ? Json(*r.sandwich_ok) : Json(nullptr);
  j["audit"] = r.audit ? to_json(*r.audit) : Json(nullptr);
  j["concavity"] = r.concavity ? to_json(*r.concavity) : Json(nullptr);
  j["identity_residuals"] = r.residuals ? to_json(*r.residuals) : Json(nullptr);
  return j;
}

std::string constants_key(const RunConfig& cfg)
{
  RunConfig key;
  key.problem = cfg.problem;
  key.cells_x = cfg.cells_x;
  key.cells_y = cfg.cells_y;
  key.estimator = cfg.estimator;
  key.output_dir = ".";
  return to_toml(key);
}

SweepReport run_sweep(const RunConfig& base, const SweepAxis& axis, const SweepOptions& opts)
{
  require(!axis.parameter.empty(), ErrorKind::Usage, "sweep parameter is empty");
  require(!axis.values.empty(), ErrorKind::Usage, "sweep axis is empty");
  const std::size_t n = axis.values.size();
  const int workers = opts.threads > 0 ? opts.threads : worker_limit();

  SweepReport out;
  out.axis = axis;
  std::vector<std::optional<RunConfig>> configs(n);
  std::vector<std::string> config_errors(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string label = run_label(i);
    try {
      configs[i] = with_overrides(base, {{"run.seed", std::to_string(base.seed + i)},
                                         {"run.name", toml_string(base.name + "_" + label)},
                                         {"run.output_dir", toml_string((base.output_dir / ("run_" + label)).string())},
                                         {axis.parameter, format_double(axis.values[i])}});
    } catch (const Error& e) {
      config_errors[i] = std::string("config: ") + to_string(e.kind()) + ": " + e.what();
    }
  }

  // Constants once per distinct problem, mesh and estimator setting.
  std::vector<std::string> keys;
  std::vector<std::size_t> key_of(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!configs[i]) {
      continue;
    }
    const std::string k = constants_key(*configs[i]);
    const auto it = std::find(keys.begin(), keys.end(), k);
    key_of[i] = static_cast<std::size_t>(it - keys.begin());
    if (it == keys.end()) {
      keys.push_back(k);
    }
  }
  std::vector<std::optional<SobolevConstants>> constants(keys.size());
  std::vector<std::size_t> representative(keys.size(), 0);
  for (std::size_t i = n; i-- > 0;) {
    if (configs[i]) {
      representative[key_of[i]] = i;
    }
  }
  parallel_for(keys.size(), workers, [&](std::size_t k) {
    try {
      const RunConfig& cfg = *configs[representative[k]];
      const DiscreteOperators ops =
          assemble_operators(build_mesh(cfg.problem, cfg.cells_x, cfg.cells_y), cfg.problem);
      constants[k] = estimate_constants(ops, cfg.estimator);
    } catch (const std::exception&) {
      // Left empty: each experiment re-estimates and records the error itself.
    }
  });

  std::vector<ExperimentReport> reports(n);
  parallel_for(n, workers, [&](std::size_t i) {
    if (!configs[i]) {
      return;
    }
    ExperimentOptions eo;
    eo.write_files = opts.write_files;
    eo.constants = constants[key_of[i]];
    reports[i] = run_experiment(*configs[i], eo);
  });

  for (std::size_t i = 0; i < n; ++i) {
    SweepRow row;
    if (configs[i]) {
      row = make_row(i, axis.values[i], reports[i]);
    } else {
      row.index = i;
      row.value = axis.values[i];
      row.status = "failed";
      row.error = config_errors[i];
      row.exit_code = kExitIoConfig;
    }
    raise_exit(out.exit_code, row.exit_code);
    out.rows.push_back(std::move(row));
  }
  out.csv = summary_csv(out.rows);
  if (opts.write_files) {
    write_text(base.output_dir / "sweep_summary.csv", out.csv);
  }
  if (opts.keep_reports) {
    out.reports = std::move(reports);
  }
  return out;
}

}  // namespace blowuplab
