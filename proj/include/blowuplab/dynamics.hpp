#pragma once

#include "blowuplab/operators.hpp"
#include "blowuplab/trajectory.hpp"

#include <Eigen/SparseCholesky>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace blowuplab {

struct IntegratorConfig {
  double dt0 = 1e-4;
  double dt_min = 1e-24;
  double safety = 0.9;
  /// Target relative sup-norm change per step.
  double tol_growth = 0.05;
  double theta_blowup = 1e8;
  double horizon = 10.0;
  int record_every = 1;
  int extrapolation_window = 8;
  /// Detect blow-up on |grad u|_2 > theta_blowup instead of the sup-norm.
  bool h1_threshold = false;
  /// A step whose relative change exceeds reject_factor * tol_growth is redone smaller.
  double reject_factor = 3.0;
  std::size_t max_steps = 5'000'000;

  /// Throws ErrorKind::Precondition on inconsistent settings. horizon = 0 is allowed.
  void validate() const;
};

/// IMEX backward Euler for (M+B) u' + A u = F(u):
///   (M + B + dt A) u_new = (M + B) u + dt F(u)   on the free nodes.
class ImexEulerStepper {
public:
  /// include_source = false integrates the linear part only.
  ImexEulerStepper(const DiscreteOperators& ops, double p, bool include_source = true);

  /// Throws ErrorKind::Precondition for dt <= 0 and ErrorKind::Solver on breakdown.
  [[nodiscard]] Field step(const Field& u, double dt);

  /// Relative residual of the last linear solve.
  [[nodiscard]] double last_residual() const { return last_residual_; }

private:
  void refactor(double dt);

  const DiscreteOperators* ops_;
  double p_;
  bool include_source_;
  SparseMatrix temporal_mass_;
  SparseMatrix system_;
  Eigen::SimplicialLDLT<SparseMatrix> solver_;
  double factored_dt_ = -1.0;
  bool analyzed_ = false;
  double last_residual_ = 0.0;
};

/// Outcome of one simulation. Bound and audit fields are filled by the analysis stage.
struct BlowupVerdict {
  BlowupStatus status = BlowupStatus::Inconclusive;
  std::optional<Time> T_est;
  std::optional<double> T_uncertainty;
  std::optional<double> T_upper_B1;
  std::optional<double> T_upper_B2;
  std::optional<double> T_lower;
  std::optional<bool> audit_clean;
  std::vector<std::string> audit_findings;
  /// Why the integration stopped.
  std::string reason;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  Time t_final = 0;
  double final_sup_norm = 0.0;
  /// min over steps of (min nodal value) / |u|_inf; positivity diagnostic for u0 >= 0.
  double min_relative_nodal_value = 0.0;
};

struct SimulationResult {
  TrajectoryRecord trajectory;
  BlowupVerdict verdict;
};

/// Integrates from u0 (taken at t = 0) with the adaptive controller
///   dt <- safety * dt * clamp(tol_growth / rel, 1/2, 2),  rel = |u_new - u|_inf / |u|_inf.
/// Stops on threshold crossing (blown_up), t >= horizon (global_on_horizon), dt < dt_min,
/// time resolution exhaustion, solver failure or max_steps (inconclusive). H is reported
/// when A is given.
SimulationResult simulate(const Field& u0, const IntegratorConfig& cfg, const DiscreteOperators& ops, double p,
                          std::optional<double> A = std::nullopt);

struct BlowupTimeEstimate {
  Time T = 0;
  /// |T(w) - T(w/2)|
  double uncertainty = 0.0;
  int window = 0;
  /// Slope of the fitted line y = |u|_2^{-(p-2)}.
  double slope = 0.0;
};

/// Least-squares line through y = |u|_2^{-(p-2)} over the trailing window; T is its root.
/// Throws ErrorKind::InsufficientData for fewer than window records and
/// ErrorKind::InconclusiveEstimate for a non-increasing tail or a non-negative slope.
BlowupTimeEstimate estimate_blowup_time(const TrajectoryRecord& traj, double p, int window = 8);

/// F(0) / (alpha F'(0)); every input must be positive.
double levine_bound(double F0, double Fprime0, double alpha);

}  // namespace blowuplab
