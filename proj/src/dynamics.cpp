#include "blowuplab/dynamics.hpp"

#include "blowuplab/error.hpp"
#include "blowuplab/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace blowuplab {

void IntegratorConfig::validate() const
{
  require(dt_min > 0.0 && dt0 > dt_min, ErrorKind::Precondition, "need dt0 > dt_min > 0");
  require(safety > 0.0 && safety <= 1.0, ErrorKind::Precondition, "safety must lie in (0, 1]");
  require(tol_growth > 0.0, ErrorKind::Precondition, "tol_growth must be positive");
  require(theta_blowup > 1.0, ErrorKind::Precondition, "theta_blowup must exceed 1");
  require(horizon >= 0.0 && std::isfinite(horizon), ErrorKind::Precondition, "horizon must be finite and >= 0");
  require(record_every >= 1, ErrorKind::Precondition, "record_every must be >= 1");
  require(extrapolation_window >= 4, ErrorKind::Precondition, "extrapolation_window must be >= 4");
  require(reject_factor > 1.0, ErrorKind::Precondition, "reject_factor must exceed 1");
  require(max_steps > 0, ErrorKind::Precondition, "max_steps must be positive");
}

ImexEulerStepper::ImexEulerStepper(const DiscreteOperators& ops, double p, bool include_source)
    : ops_(&ops), p_(p), include_source_(include_source)
{
  temporal_mass_ = ops.mass_free() + ops.boundary_mass_free();
}

void ImexEulerStepper::refactor(double dt)
{
  system_ = temporal_mass_ + dt * ops_->stiffness_free();
  if (!analyzed_) {
    solver_.analyzePattern(system_);
    analyzed_ = true;
  }
  solver_.factorize(system_);
  require(solver_.info() == Eigen::Success, ErrorKind::Solver, "factorization of M + B + dt A failed");
  factored_dt_ = dt;
}

Field ImexEulerStepper::step(const Field& u, double dt)
{
  require(dt > 0.0 && std::isfinite(dt), ErrorKind::Precondition, "step size must be positive");
  require(u.values.size() == static_cast<Eigen::Index>(ops_->size()), ErrorKind::Precondition,
          "field length does not match the mesh");
  if (dt != factored_dt_) {
    refactor(dt);
  }
  const Vector uf = ops_->restrict_free(u.values);
  Vector rhs = temporal_mass_ * uf;
  if (include_source_) {
    rhs += dt * ops_->restrict_free(ops_->source(u.values, p_));
  }

  Field next;
  next.time = u.time + static_cast<Time>(dt);
  const double rhs_norm = rhs.lpNorm<Eigen::Infinity>();
  if (rhs_norm == 0.0) {
    last_residual_ = 0.0;
    next.values = Vector::Zero(u.values.size());
    return next;
  }
  Vector x = solver_.solve(rhs);
  Vector r = rhs - system_ * x;
  last_residual_ = r.lpNorm<Eigen::Infinity>() / rhs_norm;
  for (int refine = 0; refine < 3 && last_residual_ > 1e-12; ++refine) {
    x += solver_.solve(r);
    r = rhs - system_ * x;
    last_residual_ = r.lpNorm<Eigen::Infinity>() / rhs_norm;
  }
  require(std::isfinite(last_residual_) && last_residual_ <= 1e-12, ErrorKind::Solver,
          "linear solve did not reach relative residual 1e-12");
  next.values = ops_->extend_free(x);
  return next;
}

namespace {

double sup_norm(const Vector& v) { return v.size() > 0 ? v.lpNorm<Eigen::Infinity>() : 0.0; }

class Recorder {
public:
  Recorder(TrajectoryRecord& traj, const DiscreteOperators& ops, double p, std::optional<double> A)
      : traj_(traj), ops_(ops), p_(p), A_(A)
  {
  }

  void record(const Field& u, const Vector& derivative, double dt)
  {
    EnergyReport rep = energy_report(u, ops_, p_, A_);
    rep.dt = dt;
    const double diss = dissipation(derivative, ops_);
    if (!traj_.reports.empty()) {
      const EnergyReport& prev = traj_.reports.back();
      const double h = static_cast<double>(rep.t - prev.t);
      rep.energy_residual = std::abs(rep.J - prev.J + 0.5 * h * (last_diss_ + diss));
    }
    last_diss_ = diss;
    traj_.states.push_back(u);
    traj_.derivatives.push_back(derivative);
    traj_.reports.push_back(rep);
  }

  /// The initial record has no step behind it; it takes the first step's difference.
  void patch_initial_derivative(const Vector& derivative)
  {
    traj_.derivatives.front() = derivative;
    last_diss_ = dissipation(derivative, ops_);
  }

private:
  TrajectoryRecord& traj_;
  const DiscreteOperators& ops_;
  double p_;
  std::optional<double> A_;
  double last_diss_ = 0.0;
};

}  // namespace

SimulationResult simulate(const Field& u0, const IntegratorConfig& cfg, const DiscreteOperators& ops, double p,
                          std::optional<double> A)
{
  cfg.validate();
  require_admissible(u0, ops);

  SimulationResult result;
  TrajectoryRecord& traj = result.trajectory;
  BlowupVerdict& verdict = result.verdict;
  traj.record_every = cfg.record_every;

  Field u{u0.values, 0};
  Recorder recorder(traj, ops, p, A);
  recorder.record(u, Vector::Zero(u.values.size()), 0.0);

  const Time horizon = cfg.horizon;
  double dt = cfg.dt0;
  bool first_step = true;
  double min_ratio = 0.0;
  const double u0_sup = sup_norm(u.values);
  if (u0_sup > 0.0) {
    min_ratio = std::min(0.0, u.values.minCoeff() / u0_sup);
  }

  auto finish = [&](BlowupStatus status, std::string reason) {
    verdict.status = status;
    verdict.reason = std::move(reason);
    verdict.t_final = u.time;
    verdict.final_sup_norm = sup_norm(u.values);
    verdict.accepted_steps = traj.dt_history.size();
    verdict.rejected_steps = traj.rejected_steps;
    verdict.min_relative_nodal_value = min_ratio;
  };

  if (u.time >= horizon) {
    finish(BlowupStatus::GlobalOnHorizon, "horizon reached");
    return result;
  }

  ImexEulerStepper stepper(ops, p);
  std::size_t since_record = 0;
  while (true) {
    if (traj.dt_history.size() >= cfg.max_steps) {
      finish(BlowupStatus::Inconclusive, "maximum step count reached");
      return result;
    }
    const Time remaining = horizon - u.time;
    const bool hits_horizon = static_cast<Time>(dt) >= remaining;
    const double dt_try = hits_horizon ? static_cast<double>(remaining) : dt;
    if (!(dt_try > 0.0) || u.time + static_cast<Time>(dt_try) == u.time) {
      finish(BlowupStatus::Inconclusive, "time resolution exhausted");
      return result;
    }

    Field next;
    try {
      next = stepper.step(u, dt_try);
    } catch (const Error& e) {
      finish(BlowupStatus::Inconclusive, e.what());
      return result;
    }
    if (hits_horizon) {
      next.time = horizon;
    }
    const double u_sup = sup_norm(u.values);
    const double change = sup_norm(next.values - u.values);
    if (!std::isfinite(change)) {
      finish(BlowupStatus::Inconclusive, "non-finite state");
      return result;
    }
    const double rel = u_sup > 0.0 ? change / u_sup : 0.0;

    if (rel > cfg.reject_factor * cfg.tol_growth) {
      ++traj.rejected_steps;
      dt = dt_try * std::max(0.1, cfg.safety * cfg.tol_growth / rel);
      if (dt < cfg.dt_min) {
        finish(BlowupStatus::Inconclusive, "step size fell below dt_min");
        return result;
      }
      continue;
    }

    const Vector derivative = (next.values - u.values) / dt_try;
    u = std::move(next);
    traj.dt_history.push_back(dt_try);
    const double new_sup = sup_norm(u.values);
    if (new_sup > 0.0) {
      min_ratio = std::min(min_ratio, u.values.minCoeff() / new_sup);
    }

    double monitor = new_sup;
    if (cfg.h1_threshold) {
      monitor = std::sqrt(std::max(0.0, ops.stiffness_form(u.values)));
    }
    const bool crossed = monitor > cfg.theta_blowup;
    const bool done = crossed || u.time >= horizon;

    if (first_step) {
      recorder.patch_initial_derivative(derivative);
      first_step = false;
    }
    ++since_record;
    if (done || since_record >= static_cast<std::size_t>(cfg.record_every)) {
      recorder.record(u, derivative, dt_try);
      since_record = 0;
    }

    if (crossed) {
      finish(BlowupStatus::BlownUp, cfg.h1_threshold ? "gradient norm exceeded theta_blowup"
                                                     : "sup-norm exceeded theta_blowup");
      try {
        const BlowupTimeEstimate est = estimate_blowup_time(traj, p, cfg.extrapolation_window);
        if (est.T > horizon) {
          finish(BlowupStatus::Inconclusive, "estimated blow-up time lies beyond the horizon");
          return result;
        }
        verdict.T_est = est.T;
        verdict.T_uncertainty = est.uncertainty;
      } catch (const Error& e) {
        finish(BlowupStatus::Inconclusive, std::string("threshold crossed but ") + e.what());
      }
      return result;
    }
    if (u.time >= horizon) {
      finish(BlowupStatus::GlobalOnHorizon, "horizon reached");
      return result;
    }

    const double factor = rel > 0.0 ? std::clamp(cfg.tol_growth / rel, 0.5, 2.0) : 2.0;
    dt = cfg.safety * dt_try * factor;
    if (hits_horizon) {
      dt = std::max(dt, cfg.dt_min);
    }
    if (dt < cfg.dt_min) {
      finish(BlowupStatus::Inconclusive, "step size fell below dt_min");
      return result;
    }
  }
}

}  // namespace blowuplab
