#pragma once

#include "blowuplab/analysis.hpp"
#include "blowuplab/concavity.hpp"
#include "blowuplab/config.hpp"
#include "blowuplab/constants.hpp"
#include "blowuplab/dynamics.hpp"
#include "blowuplab/error.hpp"
#include "blowuplab/functionals.hpp"
#include "blowuplab/initdata.hpp"
#include "blowuplab/io.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace blowuplab {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIoConfig = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitInvariant = 3;

/// 1 for errors caused by inputs (I/O, config, usage, invalid problem, placement,
/// construction), 2 for numerical stage failures.
int exit_code_for(ErrorKind kind);

struct BoundsReport {
  std::optional<double> upper_B1;
  std::optional<double> upper_B2;
  std::optional<double> lower;
  std::vector<std::string> notes;

  /// Smallest available upper bound.
  [[nodiscard]] std::optional<double> upper() const;
};

/// Sandwich tolerances: T_est <= 1.05 upper and, when the lower bound applies, T_est >= 0.95 lower.
inline constexpr double kUpperSlack = 1.05;
inline constexpr double kLowerSlack = 0.95;

struct ExperimentReport {
  RunConfig config;
  std::shared_ptr<const DiscreteOperators> ops;
  std::optional<SobolevConstants> constants;
  std::optional<Field> u0;
  std::optional<EnergyConstruction> construction;
  std::optional<Classification> classification;
  BoundsReport bounds;
  std::optional<SimulationResult> simulation;
  std::optional<AuditReport> audit;
  std::optional<ConcavityReport> concavity;
  std::optional<IdentityResidualReport> residuals;
  /// Set for blown_up runs with at least one bound.
  std::optional<bool> sandwich_ok;
  /// "stage: kind: message" for every failed stage.
  std::vector<std::string> errors;
  std::vector<std::filesystem::path> files;
  int exit_code = kExitOk;

  [[nodiscard]] std::optional<BlowupStatus> status() const;
};

enum class Stage { Constants, InitialData, Classify, Bounds, Simulate };

struct ExperimentOptions {
  /// Last stage to run; later stages are skipped.
  Stage last_stage = Stage::Simulate;
  bool write_files = true;
  /// Reused instead of estimating when given (must match the config's problem and mesh).
  std::optional<SobolevConstants> constants;
};

/// Pipeline constants -> u0 -> classify -> bounds -> simulate -> audits -> concavity, then
/// writes config.toml, constants.json, u0.json, verdict.json, trajectory.csv and plot.gp to
/// the output directory (operators.json with run.dump_operators). Stage errors are recorded
/// in the report and set exit_code; they are not thrown.
ExperimentReport run_experiment(const RunConfig& cfg, const ExperimentOptions& opts = {});

/// Experiment summary written to verdict.json.
Json verdict_json(const ExperimentReport& report);

/// Key identifying the constants of a config: problem, mesh and estimator settings.
std::string constants_key(const RunConfig& cfg);

struct SweepRow {
  std::size_t index = 0;
  double value = 0.0;
  std::string status;
  std::optional<double> J0;
  std::optional<double> K0;
  /// "+"-joined membership flags among B1, B2, N-.
  std::string flags;
  std::optional<double> T_est;
  std::optional<double> T_upper;
  std::optional<double> T_lower;
  std::optional<bool> sandwich_ok;
  std::string error;
  int exit_code = kExitOk;
};

struct SweepReport {
  SweepAxis axis;
  std::vector<SweepRow> rows;
  /// Filled when SweepOptions::keep_reports is set, aligned with rows.
  std::vector<ExperimentReport> reports;
  std::string csv;
  int exit_code = kExitOk;
};

struct SweepOptions {
  /// Worker cap; 0 uses worker_limit().
  int threads = 0;
  bool write_files = true;
  bool keep_reports = false;
};

/// One experiment per axis value, run in parallel with deterministic per-run seeds
/// (run.seed + index, before the axis override) and output directories run_000, run_001, ...
/// Constants are estimated once per distinct constants_key. The summary CSV has columns
/// index,param,J0,K0,flags,T_est,T_upper,T_lower,sandwich_ok,status,error and is written to
/// sweep_summary.csv. Throws ErrorKind::Usage for an empty axis.
SweepReport run_sweep(const RunConfig& base, const SweepAxis& axis, const SweepOptions& opts = {});

}  // namespace blowuplab
