#pragma once

#include "blowuplab/constants.hpp"
#include "blowuplab/trajectory.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace blowuplab {

/// Auxiliary function of the concavity argument at one recorded step:
///   F(t)   = int_0^t rho + (T - t) rho(0) + beta/2 (t + sigma)^2
///   F'(t)  = rho(t) - rho(0) + beta (t + sigma)
///   F''(t) = -K(u(t)) + beta
struct ConcavityStep {
  std::size_t index = 0;
  Time t = 0;
  double F = 0.0;
  double Fp = 0.0;
  double Fpp = 0.0;
  /// F F'' - (p/2) F'^2
  double lhs = 0.0;
  /// F [(p-2)/2 |grad u|^2 - p J(u0) - (p-1) beta]
  double rhs = 0.0;
  double tol_q = 0.0;
  bool inequality_holds = false;
  /// Centered difference of F against F'; absent at the two ends.
  std::optional<double> fd_error_Fp;
  std::optional<double> fd_tolerance_Fp;
  /// Centered difference of F' against F''; first order on a nonuniform grid, diagnostic only.
  std::optional<double> fd_error_Fpp;
};

struct ConcavityReport {
  double p = 0.0;
  double beta = 0.0;
  double sigma_F = 0.0;
  Time T = 0;
  double rho0 = 0.0;
  double J0 = 0.0;
  /// rho(0) > 0 and F'(0) > 0.
  bool hypothesis_met = false;
  std::string hypothesis_note;
  /// 4 rho(0) / ((p-2) beta)
  double sigma_beta = 0.0;
  /// (1 - 2 rho(0)/((p-2) beta sigma_F))^{-1} sigma_F / (p-2); equals 8 rho(0)/((p-2)^2 beta)
  /// at sigma_F = sigma_beta. Absent when sigma_F <= 2 rho(0)/((p-2) beta).
  std::optional<double> predicted_bound;
  /// 8 rho(0) / ((p-2)^2 beta)
  double optimal_bound = 0.0;
  /// Admissible beta ranges (0, value] for the two blow-up sets.
  std::optional<double> beta_max_B1;
  std::optional<double> beta_max_B2;
  std::vector<ConcavityStep> steps;
  bool all_F_positive = true;
  bool all_inequalities_hold = true;
  bool all_fd_Fp_consistent = true;
  std::optional<std::size_t> first_violation;
};

/// Evaluates F, F', F'' along the recorded steps with t <= T and checks
/// F F'' - (p/2) F'^2 >= F [(p-2)/2 |grad u|^2 - p J(u0) - (p-1) beta] - tol_q.
/// tol_q bounds the gap between the trapezoid integral of rho used in F and the
/// step sums the scheme satisfies, plus round-off; it is rigorous for record_every = 1.
/// Throws ErrorKind::Precondition for beta <= 0 or sigma_F <= 0 and ErrorKind::Range when T
/// lies outside the trajectory.
ConcavityReport concavity_monitor(const TrajectoryRecord& traj, const SobolevConstants& consts, double beta,
                                  double sigma_F, Time T);

/// 4 rho(0) / ((p-2) beta)
double optimal_sigma(double rho0, double p, double beta);

}  // namespace blowuplab
