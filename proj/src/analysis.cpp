#include "blowuplab/analysis.hpp"

#include "blowuplab/error.hpp"
#include "blowuplab/functionals.hpp"

#include <cmath>
#include <sstream>

namespace blowuplab {
namespace {

/// Strict membership of a slack; near-zero slacks become boundary cases.
bool strictly_positive(double slack, const char* what, Classification& c)
{
  if (std::abs(slack) < kBoundarySlack) {
    c.boundary_case = true;
    c.notes.push_back(std::string("boundary case: ") + what + " slack below 1e-12");
    return false;
  }
  return slack > 0.0;
}

double coefficient(double p) { return 4.0 * (p - 1.0) / (p * (p - 2.0) * (p - 2.0)); }

std::string describe(double value)
{
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

}  // namespace

const char* to_string(BlowupSet which) { return which == BlowupSet::B1 ? "B1" : "B2"; }

Classification classify_initial(const Field& u0, const SobolevConstants& consts, const DiscreteOperators& ops, double p)
{
  require(p > 2.0, ErrorKind::Domain, "classification needs p > 2");
  const EnergyReport r = energy_report(u0, ops, p);
  Classification c;
  c.J = r.J;
  c.K = r.K;
  c.rho = r.rho;
  c.X = r.l2_norm_sq + r.trace_l2_sq;
  c.b2_threshold = (p - 2.0) / (2.0 * p * (consts.S1.value + consts.S2.value));

  c.margin_N_minus = -c.K;
  c.in_N_minus = strictly_positive(c.margin_N_minus, "N-", c);

  c.margin_B2 = c.b2_threshold * c.X - c.J;
  c.in_B2 = strictly_positive(c.margin_B2, "B2", c);

  if (consts.has_d()) {
    c.d = consts.d();
    const double energy_slack = *c.d - c.J;
    c.margin_B1 = std::min(energy_slack, -c.K);
    c.in_B1 = strictly_positive(energy_slack, "B1 energy", c) && c.in_N_minus;
  }
  return c;
}

double upper_bound_B1_formula(double p, double d, double J0, double X)
{
  require(p > 2.0, ErrorKind::Domain, "upper bound needs p > 2");
  const double denom = d - J0;
  require(denom > 0.0, ErrorKind::NotApplicable, "d - J(u0) is not positive");
  return coefficient(p) * X / denom;
}

double upper_bound_B2_formula(double p, double S1, double S2, double J0, double X)
{
  require(p > 2.0, ErrorKind::Domain, "upper bound needs p > 2");
  const double denom = (p - 2.0) / (2.0 * p * (S1 + S2)) * X - J0;
  require(denom > 0.0, ErrorKind::NotApplicable, "B2 denominator is not positive");
  return coefficient(p) * X / denom;
}

double lower_bound_formula(double C_tilde, double X, double p, int n)
{
  require(p < 2.0 + 4.0 / n, ErrorKind::NotApplicable, "lower bound needs p < 2 + 4/n");
  require(X > 0.0, ErrorKind::NotApplicable, "lower bound undefined for the zero field");
  require(C_tilde > 0.0, ErrorKind::Domain, "C~ must be positive");
  const double exponent = 2.0 * (p - 2.0) / (4.0 - n * (p - 2.0));
  return C_tilde / std::pow(X, exponent);
}

double upper_bound_T(const Field& u0, const SobolevConstants& consts, const DiscreteOperators& ops, double p,
                     BlowupSet which)
{
  const Classification c = classify_initial(u0, consts, ops, p);
  if (which == BlowupSet::B1) {
    require(c.in_B1, ErrorKind::NotApplicable, "u0 is not in B1");
    return upper_bound_B1_formula(p, *c.d, c.J, c.X);
  }
  require(c.in_B2, ErrorKind::NotApplicable, "u0 is not in B2");
  return upper_bound_B2_formula(p, consts.S1.value, consts.S2.value, c.J, c.X);
}

double lower_bound_T(const Field& u0, const SobolevConstants& consts, const DiscreteOperators& ops, double p, int n)
{
  require(p < 2.0 + 4.0 / n, ErrorKind::NotApplicable, "lower bound needs p < 2 + 4/n");
  require(consts.derived.C_tilde.has_value(), ErrorKind::NotApplicable, "C~ was not estimated");
  const EnergyReport r = energy_report(u0, ops, p);
  return lower_bound_formula(*consts.derived.C_tilde, r.l2_norm_sq + r.trace_l2_sq, p, n);
}

AuditReport invariance_audit(const TrajectoryRecord& traj, const SobolevConstants& consts,
                             const DiscreteOperators& ops, double p, std::optional<BlowupStatus> status)
{
  AuditReport audit;
  if (traj.empty()) {
    return audit;
  }
  // No blow-up sets exist for p = 2; only the energy and necessary-condition checks apply.
  const Classification c0 = p > 2.0 ? classify_initial(traj.states.front(), consts, ops, p) : Classification{};
  audit.initial_B1 = c0.in_B1;
  audit.initial_B2 = c0.in_B2;
  audit.initial_N_minus = c0.in_N_minus;
  audit.b1_checked = c0.in_B1;
  audit.b2_checked = c0.in_B2;
  audit.n_minus_persistent = c0.in_N_minus;

  const EnergyReport& first = traj.reports.front();
  const double J0 = first.J;
  const double A = consts.A();
  const double H0 = first.rho - A * J0;

  auto violate = [&](const char* check, std::size_t k, std::string detail) {
    audit.violations.push_back({check, k, traj.reports[k].t, std::move(detail)});
  };

  bool any_negative_K = false;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const EnergyReport& r = traj.reports[k];
    if (r.K < 0.0) {
      any_negative_K = true;
    } else if (c0.in_N_minus) {
      audit.n_minus_persistent = false;
    }

    if (audit.b1_checked) {
      const bool energy_ok = r.J <= J0 + 1e-12 * std::max(1.0, std::abs(J0));
      if (!energy_ok || !(r.K < 0.0)) {
        if (audit.b1_clean) {
          violate("b1_persistence", k, "J = " + describe(r.J) + ", K = " + describe(r.K));
        }
        audit.b1_clean = false;
      }
    }

    if (audit.b2_checked) {
      const double H = r.rho - A * r.J;
      const double floor = std::exp(p / A * static_cast<double>(r.t)) * H0 * (1.0 - 1e-3);
      bool ok = H >= floor;
      if (k > 0) {
        const double prev = traj.reports[k - 1].rho;
        ok = ok && r.rho >= prev - 1e-12 * std::max(1.0, prev);
      }
      if (!ok) {
        if (audit.b2_clean) {
          violate("b2_gronwall", k, "H = " + describe(H) + ", floor = " + describe(floor));
        }
        audit.b2_clean = false;
      }
    }

    if (k > 0) {
      const double prev = traj.reports[k - 1].J;
      if (r.J > prev + 1e-12 * std::max(1.0, std::abs(prev))) {
        if (audit.energy_monotone) {
          violate("energy_monotone", k, "J increased from " + describe(prev) + " to " + describe(r.J));
        }
        audit.energy_monotone = false;
      }
    }
  }

  if (status && *status == BlowupStatus::BlownUp) {
    audit.blowup_checked = true;
    if (!any_negative_K) {
      audit.necessary_condition_holds = false;
      violate("necessary_condition", traj.size() - 1, "blown up without any recorded K < 0");
    }
  }

  for (const auto& v : audit.violations) {
    if (!audit.first_violation || v.index < audit.first_violation->index) {
      audit.first_violation = v;
    }
  }
  return audit;
}

}  // namespace blowuplab
