#include "blowuplab/analysis.hpp"
#include "blowuplab/constants.hpp"
#include "blowuplab/error.hpp"
#include "blowuplab/functionals.hpp"
#include "blowuplab/initdata.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>

namespace blowuplab {
namespace {

using testing::unit_interval;

TEST(MakeField, RampHasNodalValuesLambdaX)
{
  const auto ops = unit_interval(10, 4.0);
  InitialDataSpec spec;
  spec.family = Family::Ramp;
  spec.amplitude = 3.0;
  const Field u = make_field(spec, ops);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    EXPECT_NEAR(u.values(static_cast<Eigen::Index>(i)), 3.0 * ops.mesh().nodes[i][0], 1e-15);
  }
}

TEST(MakeField, RampMeasuresDistanceFromRightEnd)
{
  const auto ops = unit_interval(10, 4.0, 2.0, Side::Right);
  InitialDataSpec spec;
  spec.amplitude = 1.0;
  const Field u = make_field(spec, ops);
  EXPECT_EQ(u.values(10), 0.0);
  EXPECT_NEAR(u.values(0), 2.0, 1e-15);
}

TEST(MakeField, BumpOutsideDomainIsRejected)
{
  const auto ops = unit_interval(10, 4.0);
  InitialDataSpec spec;
  spec.family = Family::Bump;
  spec.center = {1.5, 0.0};
  EXPECT_ERROR_KIND(make_field(spec, ops), ErrorKind::Placement);
}

TEST(MakeField, OscillatoryIsSupportedInOmega1)
{
  const auto ops = unit_interval(100, 4.0);
  InitialDataSpec spec;
  spec.family = Family::Oscillatory;
  spec.frequency = 3;
  spec.omega1 = Region{{0.2, 0.0}, {0.6, 0.0}};
  const Field u = make_field(spec, ops);
  double inside = 0.0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const double x = ops.mesh().nodes[i][0];
    const double v = u.values(static_cast<Eigen::Index>(i));
    if (x < 0.2 - 1e-12 || x > 0.6 + 1e-12) {
      EXPECT_EQ(v, 0.0) << "x=" << x;
    } else if (x <= 0.2 + 1e-12 || x >= 0.6 - 1e-12) {
      EXPECT_NEAR(v, 0.0, 1e-14) << "x=" << x;
    } else {
      inside = std::max(inside, std::abs(v));
    }
  }
  EXPECT_GT(inside, 0.5);
}

TEST(MakeField, OverlappingSubdomainsAreRejected)
{
  const auto ops = unit_interval(100, 4.0);
  InitialDataSpec spec;
  spec.family = Family::TwoBump;
  spec.omega1 = Region{{0.1, 0.0}, {0.5, 0.0}};
  spec.omega2 = Region{{0.4, 0.0}, {0.9, 0.0}};
  EXPECT_ERROR_KIND(make_field(spec, ops), ErrorKind::Placement);
}

TEST(RandomSmoothField, DeterministicAndAdmissible)
{
  const auto ops = unit_interval(50, 4.0);
  const Field a = random_smooth_field(ops, 7);
  const Field b = random_smooth_field(ops, 7);
  const Field c = random_smooth_field(ops, 8);
  EXPECT_EQ((a.values - b.values).norm(), 0.0);
  EXPECT_GT((a.values - c.values).norm(), 0.0);
  EXPECT_EQ(a.values(0), 0.0);
  EXPECT_NO_THROW(require_admissible(a, ops));
}

class EnergyLevelTest : public ::testing::Test {
protected:
  static void SetUpTestSuite()
  {
    ops_ = std::make_unique<DiscreteOperators>(unit_interval(200, 4.0));
    EstimatorOptions opts;
    opts.richardson = false;
    consts_ = std::make_unique<SobolevConstants>(estimate_constants(*ops_, opts));
  }
  static void TearDownTestSuite()
  {
    consts_.reset();
    ops_.reset();
  }

  static std::unique_ptr<DiscreteOperators> ops_;
  static std::unique_ptr<SobolevConstants> consts_;
};

std::unique_ptr<DiscreteOperators> EnergyLevelTest::ops_;
std::unique_ptr<SobolevConstants> EnergyLevelTest::consts_;

TEST_F(EnergyLevelTest, ConstructsPrescribedEnergiesInB2)
{
  for (double a : {0.0, 100.0, -10.0, 10.0}) {
    const auto c = construct_energy_level(a, *consts_, *ops_, 4.0);
    const double J = energy_J(c.u0, *ops_, 4.0);
    EXPECT_NEAR(J, a, 1e-6 * std::max(1.0, std::abs(a))) << "a=" << a;
    EXPECT_TRUE(classify_initial(c.u0, *consts_, *ops_, 4.0).in_B2) << "a=" << a;
  }
}

TEST_F(EnergyLevelTest, OverlappingRegionsAreRejected)
{
  const Region g1{{0.1, 0.0}, {0.5, 0.0}};
  const Region g2{{0.5, 0.0}, {0.9, 0.0}};
  EXPECT_ERROR_KIND(construct_energy_level(1.0, *consts_, *ops_, 4.0, g1, g2), ErrorKind::Placement);
}

TEST_F(EnergyLevelTest, ScalingIntoB1AndB2)
{
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Field w = random_smooth_field(*ops_, seed);
    const Field u1 = scale_into_B1(w, *consts_, *ops_, 4.0, 0.5);
    const auto c1 = classify_initial(u1, *consts_, *ops_, 4.0);
    EXPECT_TRUE(c1.in_B1);
    EXPECT_NEAR(c1.J, 0.5 * consts_->d(), 1e-9 * consts_->d());
    const Field u2 = scale_into_B2(w, *consts_, *ops_, 4.0, 2.0);
    EXPECT_TRUE(classify_initial(u2, *consts_, *ops_, 4.0).in_B2);
  }
  EXPECT_ERROR_KIND(scale_into_B1(random_smooth_field(*ops_, 1), *consts_, *ops_, 4.0, 1.0), ErrorKind::Precondition);
}

}  // namespace
}  // namespace blowuplab
