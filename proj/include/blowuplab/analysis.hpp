#pragma once

#include "blowuplab/constants.hpp"
#include "blowuplab/operators.hpp"
#include "blowuplab/trajectory.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace blowuplab {

/// Slacks below this magnitude are reported as boundary cases; membership is not asserted.
inline constexpr double kBoundarySlack = 1e-12;

/// Membership of u0 in the two blow-up sets and in N-.
///   B1: J < d and K < 0
///   B2: J < (p-2)/(2p(S1+S2)) * X,   X = |u0|_2^2 + |u0|_{2,Gamma1}^2
///   N-: K < 0
struct Classification {
  double J = 0.0;
  double K = 0.0;
  double rho = 0.0;
  double X = 0.0;
  std::optional<double> d;
  double b2_threshold = 0.0;
  /// min(d - J, -K); absent without d.
  std::optional<double> margin_B1;
  double margin_B2 = 0.0;
  double margin_N_minus = 0.0;
  bool in_B1 = false;
  bool in_B2 = false;
  bool in_N_minus = false;
  bool boundary_case = false;
  std::vector<std::string> notes;
};

/// Throws ErrorKind::Domain for p <= 2.
Classification classify_initial(const Field& u0, const SobolevConstants& consts, const DiscreteOperators& ops,
                                double p);

enum class BlowupSet { B1, B2 };

const char* to_string(BlowupSet which);

/// 4(p-1)/(p(p-2)^2) * X / (d - J0)
double upper_bound_B1_formula(double p, double d, double J0, double X);
/// 4(p-1)/(p(p-2)^2) * X / ((p-2)/(2p(S1+S2)) X - J0)
double upper_bound_B2_formula(double p, double S1, double S2, double J0, double X);
/// C~ / X^{2(p-2)/(4-n(p-2))}
double lower_bound_formula(double C_tilde, double X, double p, int n);

/// Throws ErrorKind::NotApplicable unless u0 is (strictly) in the chosen set.
double upper_bound_T(const Field& u0, const SobolevConstants& consts, const DiscreteOperators& ops, double p,
                     BlowupSet which);

/// Throws ErrorKind::NotApplicable for p >= 2 + 4/n, X = 0 or a missing S3.
double lower_bound_T(const Field& u0, const SobolevConstants& consts, const DiscreteOperators& ops, double p, int n);

struct AuditViolation {
  std::string check;
  std::size_t index = 0;
  Time t = 0;
  std::string detail;
};

/// Checks per recorded step (each only when its initial flag holds):
///   b1_persistence  J <= J(u0) and K < 0
///   b2_gronwall     H >= exp(p t / A) H(0) (1 - 1e-3) and rho nondecreasing
///   energy_monotone J nonincreasing
///   necessary_condition  a blown_up run has some K < 0
///   n_minus         K < 0 throughout when K(u0) < 0
struct AuditReport {
  bool initial_B1 = false;
  bool initial_B2 = false;
  bool initial_N_minus = false;
  bool b1_checked = false;
  bool b2_checked = false;
  bool blowup_checked = false;
  bool b1_clean = true;
  bool b2_clean = true;
  bool energy_monotone = true;
  bool necessary_condition_holds = true;
  /// True only when K(u0) < 0 and K stays negative at every record.
  bool n_minus_persistent = false;
  std::vector<AuditViolation> violations;
  std::optional<AuditViolation> first_violation;

  /// No violation among b1, b2, energy and necessary-condition checks.
  [[nodiscard]] bool clean() const { return b1_clean && b2_clean && energy_monotone && necessary_condition_holds; }
};

AuditReport invariance_audit(const TrajectoryRecord& traj, const SobolevConstants& consts,
                             const DiscreteOperators& ops, double p,
                             std::optional<BlowupStatus> status = std::nullopt);

}  // namespace blowuplab
