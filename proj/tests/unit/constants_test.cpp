#include "blowuplab/constants.hpp"
#include "blowuplab/error.hpp"
#include "support.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace blowuplab {
namespace {

using testing::unit_interval;

/// Smallest eigenvalue of -w'' = mu w, w(0) = 0, w'(L) = 0, by second-order finite
/// differences with a ghost node at x = L.
double fd_first_eigenvalue(int n, double length)
{
  const double h = length / n;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 2.0;
    if (i > 0) {
      a(i, i - 1) = -1.0;
    }
    if (i + 1 < n) {
      a(i, i + 1) = -1.0;
    }
  }
  a(n - 1, n - 2) = -2.0;
  // Similarity scaling of the last unknown by sqrt(2) makes the Neumann row symmetric.
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  d(n - 1) = std::sqrt(2.0);
  const Eigen::MatrixXd s = d.asDiagonal().inverse() * a * d.asDiagonal();
  EXPECT_LT((s - s.transpose()).norm(), 1e-13);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  return eig.eigenvalues()(0) / (h * h);
}

TEST(ConstantOracles, FiniteDifferenceEigenvalue)
{
  const double mu = fd_first_eigenvalue(800, 1.0);
  EXPECT_NEAR(mu, std::numbers::pi * std::numbers::pi / 4.0, 1e-5);
}

TEST(EstimateS2, MatchesFiniteDifferenceOracle)
{
  const auto ops = unit_interval(200, 4.0);
  const auto est = estimate_S2(ops);
  EXPECT_NEAR(est.value, 1.0 / fd_first_eigenvalue(1600, 1.0), 1e-5);
  EXPECT_NEAR(est.value, 4.0 / (std::numbers::pi * std::numbers::pi), 1e-5);
}

TEST(EstimateS2, ScalesWithLengthSquared)
{
  const auto ops = unit_interval(200, 4.0, 2.0);
  EXPECT_NEAR(estimate_S2(ops).value, 1.0 / fd_first_eigenvalue(1600, 2.0), 1e-4);
}

TEST(EstimateS2, ConvergesAtSecondOrder)
{
  const double exact = 4.0 / (std::numbers::pi * std::numbers::pi);
  const double e1 = std::abs(estimate_S2(unit_interval(50, 4.0)).value - exact);
  const double e2 = std::abs(estimate_S2(unit_interval(100, 4.0)).value - exact);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.1);
}

TEST(EstimateS1, LinearMaximizerGivesLength)
{
  for (double length : {1.0, 2.0, 0.5}) {
    const auto ops = unit_interval(64, 4.0, length);
    const auto est = estimate_S1(ops);
    EXPECT_NEAR(est.value, length, 1e-12 * length);
    // Maximizer is proportional to x.
    ASSERT_EQ(est.maximizer.size(), static_cast<Eigen::Index>(ops.free_count()));
    const Vector w = ops.extend_free(est.maximizer);
    const double slope = w(w.size() - 1) / length;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      EXPECT_NEAR(w(static_cast<Eigen::Index>(i)), slope * ops.mesh().nodes[i][0], 1e-8 * std::abs(slope));
    }
  }
}

TEST(EstimateS1, DenseGeneralizedEigenOracle)
{
  // S1 = max w^T B w / w^T A w over free nodes, computed densely.
  const auto ops = unit_interval(30, 4.0);
  const Eigen::MatrixXd a(ops.stiffness_free());
  const Eigen::MatrixXd b(ops.boundary_mass_free());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(b, a);
  EXPECT_NEAR(estimate_S1(ops).value, eig.eigenvalues().maxCoeff(), 1e-12);
}

TEST(EstimateB1, ApproachesPoincareLimitNearTwo)
{
  const auto ops = unit_interval(100, 2.01);
  const double b = estimate_B1(ops, 2.01).value;
  EXPECT_NEAR(b / (2.0 / std::numbers::pi), 1.0, 0.01);
}

TEST(EstimateB1, BoundedBelowByRampObjective)
{
  // Objective at w = x: ||x||_p / ||x'||_2 = (1 / (p + 1))^{1/p}.
  for (double p : {3.0, 4.0}) {
    const auto ops = unit_interval(100, p);
    const auto est = estimate_B1(ops, p);
    EXPECT_GE(est.value, std::pow(1.0 / (p + 1.0), 1.0 / p) - 1e-9);
  }
}

TEST(EstimateB1, DeterministicForFixedSeed)
{
  const auto ops = unit_interval(60, 3.0);
  EstimatorOptions opts;
  opts.restarts = 3;
  EXPECT_EQ(estimate_B1(ops, 3.0, opts).value, estimate_B1(ops, 3.0, opts).value);
}

TEST(EstimateS3, EqualsOneAtPEqualsTwo)
{
  const auto ops = unit_interval(40, 2.0);
  EXPECT_NEAR(estimate_S3_GN(ops, 2.0, 1).value, 1.0, 1e-12);
}

TEST(EstimateS3, BoundedBelowByRampObjective)
{
  // ||x||_3^3 = 1/4, ||x||_2 = 3^{-1/2}, ||x'||_2 = 1, sigma = 1/6:
  // (1/4) / (||x||_2^{p(1-sigma)} ||x'||_2^{p sigma}) = (1/4) 3^{1.25}.
  const double ramp_value = 0.25 * std::pow(3.0, 1.25);
  const auto ops = unit_interval(100, 3.0);
  EXPECT_GE(estimate_S3_GN(ops, 3.0, 1).value, ramp_value - 1e-9);
}

TEST(EstimateS3, RejectsCriticalExponent)
{
  const auto ops = unit_interval(20, 6.0);
  EXPECT_ERROR_KIND(estimate_S3_GN(ops, 6.0, 1), ErrorKind::Domain);
}

TEST(WellDepth, FormulaValues)
{
  EXPECT_DOUBLE_EQ(well_depth_d(1.0, 4.0), 0.25);
  EXPECT_NEAR(well_depth_d(1.0, 3.0), 1.0 / 6.0, 1e-16);
  EXPECT_DOUBLE_EQ(well_depth_d(2.0, 4.0), 0.015625);
  EXPECT_ERROR_KIND(well_depth_d(0.0, 4.0), ErrorKind::Domain);
  EXPECT_ERROR_KIND(well_depth_d(-1.0, 4.0), ErrorKind::Domain);
}

TEST(DerivedConstants, FormulaValues)
{
  EXPECT_NEAR(derived_constants(1.0, 0.405285, std::nullopt, 4.0, 1).A, 2.810570, 1e-12);
  EXPECT_NEAR(gagliardo_nirenberg_sigma(3.0, 1), 1.0 / 6.0, 1e-16);

  const auto dc = derived_constants(1.0, 0.4, 1.0, 3.0, 1);
  ASSERT_TRUE(dc.S4 && dc.C_tilde);
  EXPECT_NEAR(*dc.S4, std::pow(2.0, 5.0 / 3.0), 1e-14);
  EXPECT_NEAR(*dc.C_tilde, 0.75, 1e-14);

  EXPECT_ERROR_KIND(derived_constants(1.0, 0.4, 1.0, 6.0, 1), ErrorKind::Domain);
}

}  // namespace
}  // namespace blowuplab
