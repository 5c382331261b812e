#include "blowuplab/analysis.hpp"
#include "blowuplab/constants.hpp"
#include "blowuplab/dynamics.hpp"
#include "blowuplab/error.hpp"
#include "blowuplab/functionals.hpp"
#include "support.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>

namespace blowuplab {
namespace {

using testing::ramp;
using testing::unit_interval;
using testing::zero;

TEST(ImexStepper, ZeroIsAFixedPoint)
{
  const auto ops = unit_interval(20, 4.0);
  ImexEulerStepper stepper(ops, 4.0);
  const Field next = stepper.step(zero(ops), 0.01);
  EXPECT_EQ(next.values.norm(), 0.0);
  EXPECT_NEAR(static_cast<double>(next.time), 0.01, 1e-18);
}

TEST(ImexStepper, RejectsNonpositiveStep)
{
  const auto ops = unit_interval(20, 4.0);
  ImexEulerStepper stepper(ops, 4.0);
  EXPECT_ERROR_KIND((void)stepper.step(ramp(ops, 1.0), 0.0), ErrorKind::Precondition);
  EXPECT_ERROR_KIND((void)stepper.step(ramp(ops, 1.0), -1e-3), ErrorKind::Precondition);
}

TEST(ImexStepper, MatchesDenseSolve)
{
  const auto ops = unit_interval(12, 3.0);
  const Field u = ramp(ops, 2.5);
  const double dt = 0.02;
  ImexEulerStepper stepper(ops, 3.0);
  const Field next = stepper.step(u, dt);

  const Eigen::MatrixXd m(ops.mass_free());
  const Eigen::MatrixXd b(ops.boundary_mass_free());
  const Eigen::MatrixXd a(ops.stiffness_free());
  const Vector uf = ops.restrict_free(u.values);
  const Vector rhs = (m + b) * uf + dt * ops.restrict_free(ops.source(u.values, 3.0));
  const Vector expected = (m + b + dt * a).ldlt().solve(rhs);
  EXPECT_LT((ops.restrict_free(next.values) - expected).norm(), 1e-12 * expected.norm());
  EXPECT_EQ(next.values(0), 0.0);
}

TEST(ImexStepper, LinearStepDissipates)
{
  const auto ops = unit_interval(40, 4.0);
  ImexEulerStepper stepper(ops, 4.0, false);
  Field u = testing::nodal(ops, [](double x, double) { return std::sin(3.0 * x) + x; });
  double previous = rho(u, ops);
  for (int k = 0; k < 20; ++k) {
    u = stepper.step(u, 0.01);
    const double now = rho(u, ops);
    EXPECT_LT(now, previous);
    previous = now;
  }
}

TEST(Simulate, ZeroDataStaysZero)
{
  const auto ops = unit_interval(20, 4.0);
  IntegratorConfig cfg;
  cfg.horizon = 1.0;
  const auto res = simulate(zero(ops), cfg, ops, 4.0);
  EXPECT_EQ(res.verdict.status, BlowupStatus::GlobalOnHorizon);
  for (const auto& r : res.trajectory.reports) {
    EXPECT_EQ(r.J, 0.0);
    EXPECT_EQ(r.K, 0.0);
    EXPECT_EQ(r.rho, 0.0);
    EXPECT_EQ(r.sup_norm, 0.0);
  }
}

TEST(Simulate, ZeroHorizonEndsImmediately)
{
  const auto ops = unit_interval(20, 4.0);
  IntegratorConfig cfg;
  cfg.horizon = 0.0;
  const auto res = simulate(ramp(ops, 3.0), cfg, ops, 4.0);
  EXPECT_EQ(res.verdict.status, BlowupStatus::GlobalOnHorizon);
  EXPECT_EQ(res.verdict.accepted_steps, 0u);
  EXPECT_EQ(res.trajectory.size(), 1u);
}

TEST(Simulate, LinearProblemIsGlobal)
{
  const auto ops = unit_interval(100, 2.0);
  IntegratorConfig cfg;
  cfg.horizon = 10.0;
  const auto res = simulate(ramp(ops, 3.0), cfg, ops, 2.0);
  EXPECT_EQ(res.verdict.status, BlowupStatus::GlobalOnHorizon);
  EXPECT_FALSE(res.verdict.T_est.has_value());
  EXPECT_NEAR(static_cast<double>(res.verdict.t_final), 10.0, 1e-15);
}

TEST(Simulate, LargeRampBlowsUpBeforeUpperBound)
{
  const auto ops = unit_interval(100, 4.0);
  const auto consts = estimate_constants(ops);
  const Field u0 = ramp(ops, 3.0);
  const auto cls = classify_initial(u0, consts, ops, 4.0);
  ASSERT_TRUE(cls.in_B1);
  IntegratorConfig cfg;
  cfg.tol_growth = 0.01;
  const auto res = simulate(u0, cfg, ops, 4.0, consts.A());
  ASSERT_EQ(res.verdict.status, BlowupStatus::BlownUp);
  ASSERT_TRUE(res.verdict.T_est.has_value());
  const double upper = upper_bound_T(u0, consts, ops, 4.0, BlowupSet::B1);
  EXPECT_LE(static_cast<double>(*res.verdict.T_est), upper);
  // Energy is nonincreasing along the run.
  for (std::size_t k = 1; k < res.trajectory.reports.size(); ++k) {
    EXPECT_LE(res.trajectory.reports[k].J, res.trajectory.reports[k - 1].J + 1e-12);
  }
}

TEST(Simulate, InvalidConfigIsRejected)
{
  const auto ops = unit_interval(20, 4.0);
  IntegratorConfig cfg;
  cfg.tol_growth = 0.0;
  EXPECT_ERROR_KIND(simulate(ramp(ops, 1.0), cfg, ops, 4.0), ErrorKind::Precondition);
}

TrajectoryRecord synthetic_norm_history(double p, double t0, double t1, int samples, bool blowup)
{
  TrajectoryRecord traj;
  for (int i = 0; i < samples; ++i) {
    const double t = t0 + (t1 - t0) * i / (samples - 1);
    EnergyReport r;
    r.t = t;
    const double norm = blowup ? std::pow(1.0 - t, -1.0 / (p - 2.0)) : 1.0;
    r.l2_norm_sq = norm * norm;
    traj.reports.push_back(r);
    Field f;
    f.time = t;
    traj.states.push_back(f);
  }
  return traj;
}

TEST(BlowupTime, ExactPowerLawTail)
{
  for (double p : {3.0, 4.0, 5.5}) {
    const auto traj = synthetic_norm_history(p, 0.9, 0.99, 10, true);
    const auto est = estimate_blowup_time(traj, p, 8);
    EXPECT_NEAR(static_cast<double>(est.T), 1.0, 1e-10) << "p=" << p;
    EXPECT_LT(est.uncertainty, 1e-10);
  }
}

TEST(BlowupTime, ConstantNormIsInconclusive)
{
  const auto traj = synthetic_norm_history(4.0, 0.0, 1.0, 10, false);
  EXPECT_ERROR_KIND(estimate_blowup_time(traj, 4.0, 8), ErrorKind::InconclusiveEstimate);
}

TEST(BlowupTime, HalvedWindowAgreesWithinUncertainty)
{
  const auto ops = unit_interval(100, 4.0);
  IntegratorConfig cfg;
  cfg.tol_growth = 0.01;
  const auto res = simulate(ramp(ops, 3.0), cfg, ops, 4.0);
  ASSERT_EQ(res.verdict.status, BlowupStatus::BlownUp);
  const auto full = estimate_blowup_time(res.trajectory, 4.0, 8);
  const auto half = estimate_blowup_time(res.trajectory, 4.0, 4);
  EXPECT_LE(std::abs(static_cast<double>(full.T - half.T)), full.uncertainty + 1e-15);
}

TEST(LevineBound, ClosedFormFamilies)
{
  EXPECT_DOUBLE_EQ(levine_bound(1.0, 1.0, 2.0), 0.5);
  // F(t) = (c1 - c2 t)^{-1/alpha} blows up at c1/c2 and saturates the bound.
  for (auto [c1, c2, alpha] : {std::tuple{1.0, 1.0, 1.0}, std::tuple{2.0, 3.0, 0.5}, std::tuple{0.7, 0.2, 3.0}}) {
    const double F0 = std::pow(c1, -1.0 / alpha);
    const double Fp0 = c2 / alpha * std::pow(c1, -1.0 / alpha - 1.0);
    EXPECT_NEAR(levine_bound(F0, Fp0, alpha), c1 / c2, 1e-14 * c1 / c2);
  }
  EXPECT_ERROR_KIND(levine_bound(1.0, 0.0, 1.0), ErrorKind::Domain);
}

}  // namespace
}  // namespace blowuplab
