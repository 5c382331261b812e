#include "blowuplab/functionals.hpp"

#include "blowuplab/error.hpp"

#include <algorithm>
#include <cmath>

namespace blowuplab {

const char* to_string(BlowupStatus status)
{
  switch (status) {
  case BlowupStatus::BlownUp: return "blown_up";
  case BlowupStatus::GlobalOnHorizon: return "global_on_horizon";
  case BlowupStatus::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

void require_admissible(const Field& u, const DiscreteOperators& ops)
{
  require(u.values.size() == static_cast<Eigen::Index>(ops.size()), ErrorKind::Precondition,
          "field length does not match the mesh");
  for (Index n : ops.mesh().gamma0_nodes) {
    require(u.values(n) == 0.0, ErrorKind::Precondition, "field does not vanish on Gamma0");
  }
}

double energy_J(const Field& u, const DiscreteOperators& ops, double p)
{
  require_admissible(u, ops);
  return 0.5 * ops.stiffness_form(u.values) - ops.lp_integral(u.values, p) / p;
}

double nehari_K(const Field& u, const DiscreteOperators& ops, double p)
{
  require_admissible(u, ops);
  return ops.stiffness_form(u.values) - ops.lp_integral(u.values, p);
}

double rho(const Field& u, const DiscreteOperators& ops)
{
  require_admissible(u, ops);
  return 0.5 * ops.mass_form(u.values) + 0.5 * ops.boundary_form(u.values);
}

double nehari_scale(const Field& u, const DiscreteOperators& ops, double p)
{
  require_admissible(u, ops);
  require(p > 2.0, ErrorKind::Domain, "Nehari scale needs p > 2");
  const double lp = ops.lp_integral(u.values, p);
  require(lp > 0.0, ErrorKind::UndefinedScale, "Nehari scale undefined for a field with zero L^p norm");
  const double grad = ops.stiffness_form(u.values);
  return std::pow(grad / lp, 1.0 / (p - 2.0));
}

EnergyReport energy_report(const Field& u, const DiscreteOperators& ops, double p, std::optional<double> A)
{
  require_admissible(u, ops);
  EnergyReport r;
  r.t = u.time;
  r.grad_norm_sq = ops.stiffness_form(u.values);
  r.lp_norm_p = ops.lp_integral(u.values, p);
  r.l2_norm_sq = ops.mass_form(u.values);
  r.trace_l2_sq = ops.boundary_form(u.values);
  r.J = 0.5 * r.grad_norm_sq - r.lp_norm_p / p;
  r.K = r.grad_norm_sq - r.lp_norm_p;
  r.rho = 0.5 * (r.l2_norm_sq + r.trace_l2_sq);
  if (A) {
    r.H = r.rho - *A * r.J;
  }
  r.sup_norm = u.values.size() > 0 ? u.values.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

double dissipation(const Vector& v, const DiscreteOperators& ops)
{
  return ops.mass_form(v) + ops.boundary_form(v);
}

IdentityResidualReport identity_residuals(const TrajectoryRecord& traj, const DiscreteOperators& ops, double p)
{
  require(traj.size() >= 2, ErrorKind::InsufficientData, "identity residuals need at least two recorded states");
  require(traj.derivatives.size() == traj.size() && traj.reports.size() == traj.size(), ErrorKind::InsufficientData,
          "trajectory is missing derivatives or reports");

  const std::size_t n = traj.size();
  std::vector<double> diss(n);
  std::vector<double> lp_rate(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Vector& v = traj.derivatives[k];
    diss[k] = dissipation(v, ops);
    lp_rate[k] = p * ops.source(traj.states[k].values, p).dot(v);
  }

  IdentityResidualReport report;
  double cumulative_diss = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const EnergyReport& a = traj.reports[k - 1];
    const EnergyReport& b = traj.reports[k];
    const double dt = static_cast<double>(b.t - a.t);

    const double diss_int = 0.5 * dt * (diss[k - 1] + diss[k]);
    const double lp_int = 0.5 * dt * (lp_rate[k - 1] + lp_rate[k]);
    const double k_int = 0.5 * dt * (a.K + b.K);
    cumulative_diss += diss_int;

    IntervalResidual r;
    r.t_start = a.t;
    r.t_end = b.t;
    r.energy = std::abs(b.J - a.J + diss_int);
    r.lp = std::abs(b.lp_norm_p - a.lp_norm_p - lp_int);
    r.rho = std::abs(b.rho - a.rho + k_int);
    r.energy_rel = r.energy / std::max({1.0, std::abs(a.J), std::abs(b.J), diss_int});
    r.lp_rel = r.lp / std::max({1.0, a.lp_norm_p, b.lp_norm_p});
    r.rho_rel = r.rho / std::max({1.0, a.rho, b.rho});
    report.max_energy_rel = std::max(report.max_energy_rel, r.energy_rel);
    report.max_lp_rel = std::max(report.max_lp_rel, r.lp_rel);
    report.max_rho_rel = std::max(report.max_rho_rel, r.rho_rel);
    report.intervals.push_back(r);
  }
  report.cumulative_energy = std::abs(traj.reports.back().J - traj.reports.front().J + cumulative_diss);
  return report;
}

}  // namespace blowuplab
