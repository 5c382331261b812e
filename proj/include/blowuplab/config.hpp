#pragma once

#include "blowuplab/constants.hpp"
#include "blowuplab/dynamics.hpp"
#include "blowuplab/initdata.hpp"
#include "blowuplab/problem.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace blowuplab {

enum class InitialKind {
  /// Parametric profile from InitialDataSpec.
  Family,
  /// construct_energy_level at initial.target_energy.
  EnergyLevel,
  /// Seeded random smooth field scaled into B1 (J = level d).
  RandomB1,
  /// Seeded random smooth field scaled into B2 (scale factor initial.level > 1).
  RandomB2,
  /// Nodal values read from a field JSON file written by construct-u0.
  File,
};

const char* to_string(InitialKind kind);
InitialKind parse_initial_kind(const std::string& name);

struct InitialConfig {
  InitialKind kind = InitialKind::Family;
  InitialDataSpec spec;
  double target_energy = 0.0;
  int random_modes = 4;
  /// B1 energy fraction or B2 scale factor; drawn from the run seed when absent.
  std::optional<double> level;
  std::filesystem::path path;
};

struct SweepAxis {
  /// Dotted config key, e.g. "initial.amplitude".
  std::string parameter;
  std::vector<double> values;
};

/// One "key=value" override; value is TOML syntax ("4", "\"ramp\"", "[0.1, 0.4]").
using Override = std::pair<std::string, std::string>;

/// Everything one experiment needs. Loaded from TOML with precedence CLI > file > defaults.
struct RunConfig {
  std::string name = "run";
  ProblemSpec problem;
  int cells_x = 200;
  int cells_y = 0;
  IntegratorConfig integrator;
  InitialConfig initial;
  EstimatorOptions estimator;
  std::uint64_t seed = 20240601;
  bool simulate = true;
  bool audits = true;
  bool bounds = true;
  bool concavity = true;
  bool dump_operators = false;
  std::filesystem::path output_dir = "out";
  std::optional<SweepAxis> sweep;

  /// Provenance: the file and overrides this config was built from.
  std::optional<std::filesystem::path> source_file;
  std::vector<Override> overrides;

  /// Throws ErrorKind::Config on inconsistent settings.
  void validate() const;
};

/// Defaults, then the file (if any), then the overrides in order. Unknown keys and type
/// mismatches raise ErrorKind::Config; an unreadable file raises ErrorKind::Io.
RunConfig load_config(const std::optional<std::filesystem::path>& file, const std::vector<Override>& overrides = {});

/// Same source with extra overrides appended.
RunConfig with_overrides(const RunConfig& base, const std::vector<Override>& extra);

/// Parses "key=value" (ErrorKind::Usage on a missing '=').
Override parse_override(const std::string& text);

/// Canonical TOML rendering of every effective setting.
std::string to_toml(const RunConfig& cfg);

/// Worker cap: BLOWUPLAB_THREADS if set and positive, else hardware concurrency.
int worker_limit();

}  // namespace blowuplab
