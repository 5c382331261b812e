#pragma once

#include "blowuplab/operators.hpp"
#include "blowuplab/trajectory.hpp"

#include <optional>
#include <vector>

namespace blowuplab {

/// Throws ErrorKind::Precondition unless u has the node count of ops and vanishes on Gamma0.
void require_admissible(const Field& u, const DiscreteOperators& ops);

/// J(u) = 1/2 |grad u|^2 - 1/p |u|_p^p
double energy_J(const Field& u, const DiscreteOperators& ops, double p);

/// K(u) = |grad u|^2 - |u|_p^p
double nehari_K(const Field& u, const DiscreteOperators& ops, double p);

/// rho(u) = 1/2 |u|_2^2 + 1/2 |u|_{2,Gamma1}^2
double rho(const Field& u, const DiscreteOperators& ops);

/// Scale lambda* = (|grad u|^2 / |u|_p^p)^{1/(p-2)} that puts lambda* u on the Nehari
/// manifold. Throws ErrorKind::UndefinedScale for a field with zero L^p norm.
double nehari_scale(const Field& u, const DiscreteOperators& ops, double p);

/// All functionals of one state. H = rho - A J is filled when A is given.
EnergyReport energy_report(const Field& u, const DiscreteOperators& ops, double p,
                           std::optional<double> A = std::nullopt);

/// Residuals of the three differential identities over one recorded interval [s, t].
///
/// energy: |J(t) - J(s) + int_s^t (|u_t|_2^2 + |u_t|_{2,Gamma1}^2)|
/// lp:     |Q(t) - Q(s) - int_s^t p (|u|^{p-2} u, u_t)|,  Q = |u|_p^p
/// rho:    |rho(t) - rho(s) + int_s^t K(u)|
/// Time integrals use the trapezoid rule on the recorded derivatives. Each *_rel value is
/// the residual divided by max(1, magnitude of the terms at both ends of the interval).
struct IntervalResidual {
  Time t_start = 0;
  Time t_end = 0;
  double energy = 0.0;
  double energy_rel = 0.0;
  double lp = 0.0;
  double lp_rel = 0.0;
  double rho = 0.0;
  double rho_rel = 0.0;
};

struct IdentityResidualReport {
  std::vector<IntervalResidual> intervals;
  double max_energy_rel = 0.0;
  double max_lp_rel = 0.0;
  double max_rho_rel = 0.0;
  /// Cumulative energy identity residual from t = 0 to the last record.
  double cumulative_energy = 0.0;
};

/// Throws ErrorKind::InsufficientData when fewer than two states are recorded.
IdentityResidualReport identity_residuals(const TrajectoryRecord& traj, const DiscreteOperators& ops, double p);

/// Dissipation |v|_2^2 + |v|_{2,Gamma1}^2 of a time-derivative field.
double dissipation(const Vector& v, const DiscreteOperators& ops);

}  // namespace blowuplab
