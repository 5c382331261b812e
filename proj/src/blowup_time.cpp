#include "blowuplab/concavity.hpp"
#include "blowuplab/dynamics.hpp"
#include "blowuplab/error.hpp"

#include <algorithm>
#include <cmath>

namespace blowuplab {
namespace {

/// Root of the least-squares line through (t_i - t_last, y_i) for the last n records.
std::pair<Time, double> fit_root(const TrajectoryRecord& traj, double p, std::size_t n)
{
  const std::size_t end = traj.size();
  const Time t_last = traj.reports[end - 1].t;
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = end - n; i < end; ++i) {
    sx += static_cast<double>(traj.reports[i].t - t_last);
    sy += std::pow(traj.reports[i].l2_norm_sq, -0.5 * (p - 2.0));
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = end - n; i < end; ++i) {
    const double dx = static_cast<double>(traj.reports[i].t - t_last) - mx;
    const double dy = std::pow(traj.reports[i].l2_norm_sq, -0.5 * (p - 2.0)) - my;
    sxx += dx * dx;
    sxy += dx * dy;
  }
  require(sxx > 0.0, ErrorKind::InconclusiveEstimate, "window has no time spread");
  const double slope = sxy / sxx;
  require(slope < 0.0 && std::isfinite(slope), ErrorKind::InconclusiveEstimate,
          "fitted slope is not negative; no blow-up trend");
  const double intercept = my - slope * mx;
  return {t_last + static_cast<Time>(-intercept / slope), slope};
}

}  // namespace

BlowupTimeEstimate estimate_blowup_time(const TrajectoryRecord& traj, double p, int window)
{
  require(p > 2.0, ErrorKind::Domain, "blow-up time extrapolation needs p > 2");
  require(window >= 4, ErrorKind::Precondition, "extrapolation window must be >= 4");
  const auto w = static_cast<std::size_t>(window);
  require(traj.reports.size() >= w, ErrorKind::InsufficientData, "fewer records than the extrapolation window");
  const std::size_t end = traj.size();
  for (std::size_t i = end - w + 1; i < end; ++i) {
    require(traj.reports[i].l2_norm_sq > traj.reports[i - 1].l2_norm_sq && traj.reports[i].t > traj.reports[i - 1].t,
            ErrorKind::InconclusiveEstimate, "L2 norm is not strictly increasing over the window");
  }
  const auto [T_full, slope] = fit_root(traj, p, w);
  const auto [T_half, slope_half] = fit_root(traj, p, w / 2);
  (void)slope_half;
  BlowupTimeEstimate est;
  est.T = T_full;
  est.uncertainty = static_cast<double>(std::abs(T_full - T_half));
  est.window = window;
  est.slope = slope;
  return est;
}

double levine_bound(double F0, double Fprime0, double alpha)
{
  require(F0 > 0.0 && Fprime0 > 0.0 && alpha > 0.0, ErrorKind::Domain,
          "Levine bound needs F(0) > 0, F'(0) > 0 and alpha > 0");
  return F0 / (alpha * Fprime0);
}

double optimal_sigma(double rho0, double p, double beta)
{
  require(p > 2.0 && beta > 0.0, ErrorKind::Domain, "optimal sigma needs p > 2 and beta > 0");
  return 4.0 * rho0 / ((p - 2.0) * beta);
}

ConcavityReport concavity_monitor(const TrajectoryRecord& traj, const SobolevConstants& consts, double beta,
                                  double sigma_F, Time T)
{
  require(beta > 0.0, ErrorKind::Precondition, "beta must be positive");
  require(sigma_F > 0.0, ErrorKind::Precondition, "sigma_F must be positive");
  require(!traj.empty(), ErrorKind::InsufficientData, "empty trajectory");
  const double p = consts.p;
  require(p > 2.0, ErrorKind::Domain, "concavity argument needs p > 2");
  require(T >= traj.reports.front().t && T <= traj.reports.back().t, ErrorKind::Range,
          "T lies outside the recorded trajectory");

  ConcavityReport rep;
  rep.p = p;
  rep.beta = beta;
  rep.sigma_F = sigma_F;
  rep.T = T;
  rep.rho0 = traj.reports.front().rho;
  rep.J0 = traj.reports.front().J;
  rep.sigma_beta = optimal_sigma(rep.rho0, p, beta);
  rep.optimal_bound = 8.0 * rep.rho0 / ((p - 2.0) * (p - 2.0) * beta);
  const double sigma_floor = 2.0 * rep.rho0 / ((p - 2.0) * beta);
  if (sigma_F > sigma_floor) {
    rep.predicted_bound = sigma_F / ((1.0 - sigma_floor / sigma_F) * (p - 2.0));
  }
  rep.hypothesis_met = rep.rho0 > 0.0;
  if (!rep.hypothesis_met) {
    rep.hypothesis_note = "hypothesis not met: rho(0) = 0";
  }
  if (consts.has_d()) {
    rep.beta_max_B1 = p * (consts.d() - rep.J0) / (p - 1.0);
  }
  if (traj.reports.front().H) {
    rep.beta_max_B2 = p * (*traj.reports.front().H) / (consts.A() * (p - 1.0));
  }

  std::size_t n = 0;
  while (n < traj.size() && traj.reports[n].t <= T) {
    ++n;
  }

  // Integral of rho by the trapezoid rule, and the accumulated half-differences
  // 1/2 sum dt |rho_k - rho_{k-1}| separating it from the right-endpoint step sums.
  std::vector<double> integral(n, 0.0);
  std::vector<double> gap(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double h = static_cast<double>(traj.reports[k].t - traj.reports[k - 1].t);
    integral[k] = integral[k - 1] + 0.5 * h * (traj.reports[k].rho + traj.reports[k - 1].rho);
    gap[k] = gap[k - 1] + 0.5 * h * std::abs(traj.reports[k].rho - traj.reports[k - 1].rho);
  }

  auto F_at = [&](std::size_t k) {
    const Time t = traj.reports[k].t;
    const double s = static_cast<double>(t) + sigma_F;
    return integral[k] + static_cast<double>(T - t) * rep.rho0 + 0.5 * beta * s * s;
  };
  auto Fp_at = [&](std::size_t k) {
    return traj.reports[k].rho - rep.rho0 + beta * (static_cast<double>(traj.reports[k].t) + sigma_F);
  };

  for (std::size_t k = 0; k < n; ++k) {
    const EnergyReport& r = traj.reports[k];
    ConcavityStep s;
    s.index = k;
    s.t = r.t;
    s.F = F_at(k);
    s.Fp = Fp_at(k);
    s.Fpp = -r.K + beta;
    s.lhs = s.F * s.Fpp - 0.5 * p * s.Fp * s.Fp;
    const double bracket = 0.5 * (p - 2.0) * r.grad_norm_sq - p * rep.J0 - (p - 1.0) * beta;
    s.rhs = s.F * bracket;
    const double dissipated = std::max(0.0, rep.J0 - r.J);
    s.tol_q = p * (dissipated + beta) * gap[k] +
              1e-12 * (std::abs(s.F * s.Fpp) + 0.5 * p * s.Fp * s.Fp + std::abs(s.rhs));
    s.inequality_holds = s.lhs >= s.rhs - s.tol_q;

    if (k > 0 && k + 1 < n) {
      const double hm = static_cast<double>(r.t - traj.reports[k - 1].t);
      const double hp = static_cast<double>(traj.reports[k + 1].t - r.t);
      // F(t+) - F(t-) assembled from increments to avoid cancellation.
      const double tm = static_cast<double>(traj.reports[k - 1].t) + sigma_F;
      const double tp = static_cast<double>(traj.reports[k + 1].t) + sigma_F;
      const double dF = (integral[k + 1] - integral[k - 1]) - (hm + hp) * rep.rho0 + 0.5 * beta * (tp - tm) * (tp + tm);
      const double fd = dF / (hm + hp);
      s.fd_error_Fp = std::abs(fd - s.Fp);
      const double drho = std::max(std::abs(r.rho - traj.reports[k - 1].rho), std::abs(traj.reports[k + 1].rho - r.rho));
      s.fd_tolerance_Fp = 0.5 * drho + 0.5 * beta * std::abs(hp - hm) + 1e-12 * (std::abs(fd) + std::abs(s.Fp));
      const double fd2 = (Fp_at(k + 1) - Fp_at(k - 1)) / (hm + hp);
      s.fd_error_Fpp = std::abs(fd2 - s.Fpp);
      if (*s.fd_error_Fp > *s.fd_tolerance_Fp) {
        rep.all_fd_Fp_consistent = false;
      }
    }

    if (!(s.F > 0.0)) {
      rep.all_F_positive = false;
    }
    if (!s.inequality_holds) {
      rep.all_inequalities_hold = false;
      if (!rep.first_violation) {
        rep.first_violation = k;
      }
    }
    rep.steps.push_back(s);
  }
  return rep;
}

}  // namespace blowuplab
