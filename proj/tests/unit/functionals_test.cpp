#include "blowuplab/dynamics.hpp"
#include "blowuplab/error.hpp"
#include "blowuplab/functionals.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace blowuplab {
namespace {

using testing::ramp;
using testing::unit_interval;
using testing::zero;

class FunctionalsTest : public ::testing::Test {
protected:
  DiscreteOperators ops = unit_interval(20, 4.0);
};

TEST_F(FunctionalsTest, EnergyOfRamp)
{
  EXPECT_EQ(energy_J(zero(ops), ops, 4.0), 0.0);
  EXPECT_NEAR(energy_J(ramp(ops, 1.0), ops, 4.0), 0.45, 1e-13);
  EXPECT_NEAR(energy_J(ramp(ops, 2.0), ops, 4.0), 1.2, 1e-13);
}

TEST_F(FunctionalsTest, NehariOfRamp)
{
  EXPECT_EQ(nehari_K(zero(ops), ops, 4.0), 0.0);
  EXPECT_NEAR(nehari_K(ramp(ops, 1.0), ops, 4.0), 0.8, 1e-13);
  EXPECT_NEAR(nehari_K(ramp(ops, std::sqrt(5.0)), ops, 4.0), 0.0, 1e-12);
  // K(lambda x) = lambda^2 - lambda^4 / 5.
  for (double lambda : {0.5, 1.7, 2.5, 4.0}) {
    const double l2 = lambda * lambda;
    EXPECT_NEAR(nehari_K(ramp(ops, lambda), ops, 4.0), l2 - l2 * l2 / 5.0, 1e-11);
  }
}

TEST_F(FunctionalsTest, RhoOfRamp)
{
  EXPECT_EQ(rho(zero(ops), ops), 0.0);
  // Consistent mass makes the P1 integral of x^2 exact.
  EXPECT_NEAR(rho(ramp(ops, 1.0), ops), 2.0 / 3.0, 1e-14);
}

TEST_F(FunctionalsTest, FieldViolatingGamma0IsRejected)
{
  const auto right = unit_interval(20, 4.0, 1.0, Side::Right);
  EXPECT_ERROR_KIND(rho(ramp(right, 1.0), right), ErrorKind::Precondition);
  EXPECT_ERROR_KIND(energy_J(ramp(right, 1.0), right, 4.0), ErrorKind::Precondition);
}

TEST_F(FunctionalsTest, NehariScale)
{
  EXPECT_NEAR(nehari_scale(ramp(ops, 1.0), ops, 4.0), std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(nehari_scale(ramp(ops, std::sqrt(5.0)), ops, 4.0), 1.0, 1e-12);
  EXPECT_ERROR_KIND(nehari_scale(zero(ops), ops, 4.0), ErrorKind::UndefinedScale);
}

TEST_F(FunctionalsTest, NehariScaleLandsOnManifold)
{
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    Field u = zero(ops);
    for (Eigen::Index i = 1; i < u.values.size(); ++i) {
      u.values(i) = normal(rng);
    }
    for (double p : {2.5, 3.0, 4.0, 6.0}) {
      const double s = nehari_scale(u, ops, p);
      Field v = u;
      v.values *= s;
      const double grad = ops.stiffness_form(v.values);
      EXPECT_NEAR(nehari_K(v, ops, p) / grad, 0.0, 1e-11);
    }
  }
}

TEST_F(FunctionalsTest, EnergyDecomposition)
{
  // J = (p-2)/(2p) |grad u|^2 + K/p.
  const Field u = testing::nodal(ops, [](double x, double) { return 3.0 * std::sin(2.0 * x) + x * x; });
  for (double p : {2.5, 3.0, 4.0}) {
    const double grad = ops.stiffness_form(u.values);
    EXPECT_NEAR(energy_J(u, ops, p), (p - 2.0) / (2.0 * p) * grad + nehari_K(u, ops, p) / p, 1e-12);
  }
}

TEST_F(FunctionalsTest, IdentityResidualsOfZeroTrajectory)
{
  TrajectoryRecord traj;
  for (int k = 0; k < 3; ++k) {
    Field z = zero(ops);
    z.time = 0.1L * k;
    traj.states.push_back(z);
    traj.derivatives.push_back(z.values);
    traj.reports.push_back(energy_report(z, ops, 4.0));
  }
  const auto rep = identity_residuals(traj, ops, 4.0);
  EXPECT_EQ(rep.max_energy_rel, 0.0);
  EXPECT_EQ(rep.max_lp_rel, 0.0);
  EXPECT_EQ(rep.max_rho_rel, 0.0);
  EXPECT_EQ(rep.cumulative_energy, 0.0);
}

TEST_F(FunctionalsTest, IdentityResidualsNeedTwoStates)
{
  TrajectoryRecord traj;
  const Field z = zero(ops);
  traj.states.push_back(z);
  traj.derivatives.push_back(z.values);
  traj.reports.push_back(energy_report(z, ops, 4.0));
  EXPECT_ERROR_KIND(identity_residuals(traj, ops, 4.0), ErrorKind::InsufficientData);
}

TEST(IdentityResiduals, FirstOrderUnderStepHalving)
{
  const auto ops = unit_interval(100, 4.0);
  const Field u0 = ramp(ops, 3.0);
  IntegratorConfig cfg;
  cfg.dt0 = 1e-4;
  cfg.tol_growth = 0.01;
  cfg.horizon = 0.05;
  const auto coarse = simulate(u0, cfg, ops, 4.0);
  cfg.dt0 *= 0.5;
  cfg.tol_growth *= 0.5;
  const auto fine = simulate(u0, cfg, ops, 4.0);
  const double r1 = identity_residuals(coarse.trajectory, ops, 4.0).max_energy_rel;
  const double r2 = identity_residuals(fine.trajectory, ops, 4.0).max_energy_rel;
  EXPECT_GT(r1, 0.0);
  EXPECT_GE(r1 / r2, 1.8);
}

}  // namespace
}  // namespace blowuplab
