#pragma once

#include "blowuplab/operators.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace blowuplab {

/// Simulation time. Extended precision keeps consecutive times distinct when the step
/// shrinks far below the double ulp of t close to blow-up.
using Time = long double;

/// Nodal coefficients of a state u(., t); Gamma0 entries are exactly zero.
struct Field {
  Vector values;
  Time time = 0;
};

/// Scalar functionals of one recorded state.
struct EnergyReport {
  Time t = 0;
  /// Step that produced the state (0 for the initial state).
  double dt = 0.0;
  double J = 0.0;
  double K = 0.0;
  double rho = 0.0;
  double grad_norm_sq = 0.0;
  double lp_norm_p = 0.0;
  double l2_norm_sq = 0.0;
  double trace_l2_sq = 0.0;
  std::optional<double> H;
  /// Energy identity residual over the interval ending at this record.
  double energy_residual = 0.0;
  double sup_norm = 0.0;
};

enum class BlowupStatus { BlownUp, GlobalOnHorizon, Inconclusive };

const char* to_string(BlowupStatus status);

/// Recorded trajectory. states, derivatives and reports are aligned index by index.
///
/// derivatives[k] is the backward difference (u_k - u_{k-1}) / dt of the step that produced
/// states[k]; derivatives[0] repeats the first step's difference.
struct TrajectoryRecord {
  std::vector<Field> states;
  std::vector<Vector> derivatives;
  std::vector<EnergyReport> reports;
  /// Every accepted step size, recorded or not.
  std::vector<double> dt_history;
  std::size_t rejected_steps = 0;
  /// Stride used for recording; audits are exact only for stride 1.
  int record_every = 1;

  [[nodiscard]] std::size_t size() const { return states.size(); }
  [[nodiscard]] bool empty() const { return states.empty(); }
};

}  // namespace blowuplab
