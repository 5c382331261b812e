#include "blowuplab/analysis.hpp"
#include "blowuplab/concavity.hpp"
#include "blowuplab/constants.hpp"
#include "blowuplab/dynamics.hpp"
#include "blowuplab/error.hpp"
#include "blowuplab/functionals.hpp"
#include "blowuplab/initdata.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace blowuplab {
namespace {

using testing::ramp;
using testing::unit_interval;
using testing::zero;

class AnalysisTest : public ::testing::Test {
protected:
  DiscreteOperators ops = unit_interval(100, 4.0);
  SobolevConstants consts = make_constants(4.0, 1, 1.0, 0.405285, 0.70983);
};

TEST_F(AnalysisTest, ZeroFieldIsInNoSet)
{
  const auto c = classify_initial(zero(ops), consts, ops, 4.0);
  EXPECT_FALSE(c.in_B1);
  EXPECT_FALSE(c.in_B2);
  EXPECT_FALSE(c.in_N_minus);
  EXPECT_EQ(c.J, 0.0);
  EXPECT_EQ(c.K, 0.0);
  EXPECT_EQ(c.rho, 0.0);
}

TEST_F(AnalysisTest, RampEntersNehariMinusPastSqrtFive)
{
  for (double lambda : {1.0, 2.0, 2.2, 2.25, 2.5, 4.0}) {
    const auto c = classify_initial(ramp(ops, lambda), consts, ops, 4.0);
    EXPECT_EQ(c.in_N_minus, lambda * lambda > 5.0) << lambda;
    EXPECT_NEAR(c.K, lambda * lambda - std::pow(lambda, 4) / 5.0, 1e-10);
  }
}

TEST_F(AnalysisTest, B2ImpliesNehariMinus)
{
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Field w = random_smooth_field(ops, seed);
    for (double s : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      Field u = w;
      u.values *= s;
      const auto c = classify_initial(u, consts, ops, 4.0);
      if (c.in_B2) {
        EXPECT_TRUE(c.in_N_minus) << "seed " << seed << " scale " << s;
      }
      if (c.in_B1) {
        EXPECT_TRUE(c.in_N_minus) << "seed " << seed << " scale " << s;
      }
    }
  }
}

TEST(UpperBounds, FormulaValues)
{
  EXPECT_NEAR(upper_bound_B1_formula(4.0, 1.0, 0.5, 2.0), 3.0, 1e-14);
  EXPECT_ERROR_KIND(upper_bound_B1_formula(4.0, 1.0, 1.0, 2.0), ErrorKind::NotApplicable);
  const double threshold = (4.0 - 2.0) / (2.0 * 4.0 * 1.405285);
  EXPECT_NEAR(threshold, 0.177897, 1e-5);
  const double expected = 0.75 * 10.0 / (threshold * 10.0 - 1.0);
  EXPECT_NEAR(upper_bound_B2_formula(4.0, 1.0, 0.405285, 1.0, 10.0), expected, 1e-12);
  EXPECT_NEAR(expected, 9.628, 1e-3);
}

TEST(LowerBound, FormulaValues)
{
  EXPECT_NEAR(lower_bound_formula(0.75, 8.0, 3.0, 1), 0.1875, 1e-15);
  EXPECT_ERROR_KIND(lower_bound_formula(0.75, 8.0, 6.0, 1), ErrorKind::NotApplicable);
  EXPECT_ERROR_KIND(lower_bound_formula(0.75, 0.0, 3.0, 1), ErrorKind::NotApplicable);
}

TEST_F(AnalysisTest, BoundsOfZeroFieldAreNotApplicable)
{
  EXPECT_ERROR_KIND(upper_bound_T(zero(ops), consts, ops, 4.0, BlowupSet::B1), ErrorKind::NotApplicable);
  EXPECT_ERROR_KIND(upper_bound_T(zero(ops), consts, ops, 4.0, BlowupSet::B2), ErrorKind::NotApplicable);
  const auto ops3 = unit_interval(50, 3.0);
  const auto c3 = make_constants(3.0, 1, 1.0, 0.405285, 0.678, 1.036);
  EXPECT_ERROR_KIND(lower_bound_T(zero(ops3), c3, ops3, 3.0, 1), ErrorKind::NotApplicable);
}

TrajectoryRecord zero_trajectory(const DiscreteOperators& ops, double p, int n)
{
  TrajectoryRecord traj;
  for (int k = 0; k < n; ++k) {
    Field z = zero(ops);
    z.time = 0.1L * k;
    traj.states.push_back(z);
    traj.derivatives.push_back(z.values);
    traj.reports.push_back(energy_report(z, ops, p));
    traj.dt_history.push_back(0.1);
  }
  return traj;
}

TEST_F(AnalysisTest, AuditOfZeroTrajectoryIsVacuouslyClean)
{
  const auto audit = invariance_audit(zero_trajectory(ops, 4.0, 5), consts, ops, 4.0);
  EXPECT_TRUE(audit.clean());
  EXPECT_FALSE(audit.b1_checked);
  EXPECT_FALSE(audit.b2_checked);
  EXPECT_TRUE(audit.violations.empty());
}

TEST(Audit, LinearRunSkipsBlowupCheck)
{
  const auto ops = unit_interval(50, 2.0);
  IntegratorConfig cfg;
  cfg.horizon = 2.0;
  const auto res = simulate(ramp(ops, 3.0), cfg, ops, 2.0);
  const auto c = make_constants(2.0, 1, 1.0, 0.405285, std::nullopt);
  const auto audit = invariance_audit(res.trajectory, c, ops, 2.0, res.verdict.status);
  EXPECT_FALSE(audit.blowup_checked);
  EXPECT_TRUE(audit.clean());
}

TEST_F(AnalysisTest, AuditOfB1RunIsClean)
{
  const auto est = estimate_constants(ops);
  const Field u0 = ramp(ops, 3.0);
  IntegratorConfig cfg;
  cfg.tol_growth = 0.01;
  const auto res = simulate(u0, cfg, ops, 4.0, est.A());
  const auto audit = invariance_audit(res.trajectory, est, ops, 4.0, res.verdict.status);
  EXPECT_TRUE(audit.initial_B1);
  EXPECT_TRUE(audit.b1_checked);
  EXPECT_TRUE(audit.clean());
  EXPECT_TRUE(audit.n_minus_persistent);
}

TEST_F(AnalysisTest, ConcavityZeroTrajectoryFailsHypothesis)
{
  const auto rep = concavity_monitor(zero_trajectory(ops, 4.0, 5), consts, 1.0, 1.0, 0.4L);
  EXPECT_FALSE(rep.hypothesis_met);
  EXPECT_FALSE(rep.hypothesis_note.empty());
}

TEST_F(AnalysisTest, ConcavityRejectsTimeOutsideTrajectory)
{
  EXPECT_ERROR_KIND(concavity_monitor(zero_trajectory(ops, 4.0, 5), consts, 1.0, 1.0, 2.0L), ErrorKind::Range);
}

TEST_F(AnalysisTest, ConcavityHoldsOnB1RunWithOptimalSigma)
{
  const auto est = estimate_constants(ops);
  const Field u0 = ramp(ops, 3.0);
  IntegratorConfig cfg;
  cfg.tol_growth = 0.01;
  const auto res = simulate(u0, cfg, ops, 4.0, est.A());
  ASSERT_EQ(res.verdict.status, BlowupStatus::BlownUp);
  const double J0 = energy_J(u0, ops, 4.0);
  const double beta = 0.5 * 4.0 * (est.d() - J0) / 3.0;
  const double rho0 = rho(u0, ops);
  const double sigma = optimal_sigma(rho0, 4.0, beta);
  const auto rep = concavity_monitor(res.trajectory, est, beta, sigma, res.trajectory.reports.back().t);
  EXPECT_TRUE(rep.hypothesis_met);
  EXPECT_TRUE(rep.all_F_positive);
  EXPECT_TRUE(rep.all_inequalities_hold);
  ASSERT_TRUE(rep.predicted_bound.has_value());
  EXPECT_NEAR(*rep.predicted_bound, 8.0 * rho0 / (4.0 * beta), 1e-12 * *rep.predicted_bound);
}

}  // namespace
}  // namespace blowuplab
