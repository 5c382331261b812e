#include "blowuplab/error.hpp"
#include "blowuplab/mesh.hpp"
#include "blowuplab/operators.hpp"
#include "blowuplab/quadrature.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace blowuplab {
namespace {

using testing::unit_interval;

TEST(IntervalMesh, EquispacedNodesAndPartition)
{
  const Mesh m = build_interval_mesh(1.0, 4, Side::Left);
  ASSERT_EQ(m.node_count(), 5u);
  for (int i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(m.nodes[static_cast<std::size_t>(i)][0], 0.25 * i);
  }
  EXPECT_EQ(m.gamma0_nodes, std::vector<Index>{0});
  EXPECT_EQ(m.gamma1_nodes, std::vector<Index>{4});
}

TEST(IntervalMesh, MinimalMesh)
{
  const Mesh m = build_interval_mesh(1.0, 1, Side::Left);
  EXPECT_EQ(m.node_count(), 2u);
  EXPECT_EQ(m.gamma0_nodes, std::vector<Index>{0});
  EXPECT_EQ(m.gamma1_nodes, std::vector<Index>{1});
}

TEST(IntervalMesh, RightDirichletEnd)
{
  const Mesh m = build_interval_mesh(2.0, 8, Side::Right);
  EXPECT_EQ(m.gamma0_nodes, std::vector<Index>{8});
  EXPECT_EQ(m.gamma1_nodes, std::vector<Index>{0});
}

TEST(IntervalMesh, RejectsBadInput)
{
  EXPECT_ERROR_KIND(build_interval_mesh(1.0, 0, Side::Left), ErrorKind::InvalidMesh);
  EXPECT_ERROR_KIND(build_interval_mesh(0.0, 4, Side::Left), ErrorKind::InvalidMesh);
  EXPECT_ERROR_KIND(build_interval_mesh(-1.0, 4, Side::Left), ErrorKind::InvalidMesh);
}

TEST(RectangleMesh, CornerNodesGoToGamma0)
{
  const Mesh m = build_rectangle_mesh(1.0, 1.0, 2, 2, EdgeSet{Edge::Left});
  EXPECT_EQ(m.node_count(), 9u);
  EXPECT_EQ(m.gamma0_nodes.size(), 3u);
  EXPECT_EQ(m.gamma1_nodes.size(), 5u);

  const Mesh m2 = build_rectangle_mesh(1.0, 1.0, 1, 1, EdgeSet{Edge::Left, Edge::Bottom});
  EXPECT_EQ(m2.node_count(), 4u);
  EXPECT_EQ(m2.gamma0_nodes.size(), 3u);
  EXPECT_EQ(m2.gamma1_nodes.size(), 1u);
}

TEST(RectangleMesh, EmptyGamma0IsRejected)
{
  EXPECT_ERROR_KIND(build_rectangle_mesh(1.0, 1.0, 2, 2, EdgeSet{}), ErrorKind::InvalidPartition);
}

TEST(GaussLegendre, IntegratesPolynomialsExactly)
{
  for (int n = 1; n <= 8; ++n) {
    const GaussRule rule = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < rule.points.size(); ++i) {
        sum += rule.weights[i] * std::pow(rule.points[i], k);
      }
      // Reference interval [0, 1]: integral of x^k is 1 / (k + 1).
      EXPECT_NEAR(sum, 1.0 / (k + 1), 1e-14) << "n=" << n << " k=" << k;
    }
  }
}

TEST(Operators, MassAndStiffnessOfKnownFields)
{
  const auto ops = unit_interval(16, 4.0);
  const Field x = testing::ramp(ops, 1.0);
  EXPECT_NEAR(ops.mass_form(x.values), 1.0 / 3.0, 1e-3);
  EXPECT_NEAR(ops.stiffness_form(x.values), 1.0, 1e-13);
  EXPECT_NEAR(ops.boundary_form(x.values), 1.0, 1e-14);

  // Consistent P1 mass integrates products of P1 functions exactly.
  const Field one = testing::nodal(ops, [](double, double) { return 1.0; });
  EXPECT_NEAR(one.values.dot(ops.mass() * x.values), 0.5, 1e-14);
  EXPECT_NEAR(x.values.dot(ops.mass() * x.values), 1.0 / 3.0, 1e-14);
}

TEST(Operators, MatricesAreSymmetric)
{
  ProblemSpec spec;
  spec.dim = 2;
  spec.length_x = 1.0;
  spec.length_y = 0.5;
  spec.gamma0_edges = EdgeSet{Edge::Left};
  spec.p = 3.0;
  const auto ops = assemble_operators(build_rectangle_mesh(1.0, 0.5, 6, 3, spec.gamma0_edges), spec);
  for (const SparseMatrix* m : {&ops.mass(), &ops.stiffness(), &ops.boundary_mass()}) {
    const SparseMatrix diff = SparseMatrix(m->transpose()) - *m;
    EXPECT_LT(diff.norm(), 1e-14);
  }
  const Field one = testing::nodal(ops, [](double, double) { return 1.0; });
  EXPECT_NEAR(ops.mass_form(one.values), 0.5, 1e-13);
  // Gamma1 is the right, bottom and top edges: total length 0.5 + 1 + 1.
  EXPECT_NEAR(ops.boundary_form(one.values), 2.5, 1e-13);
  EXPECT_NEAR(ops.stiffness_form(one.values), 0.0, 1e-13);
}

TEST(Operators, LpIntegralOfRampIsExact)
{
  const auto ops = unit_interval(10, 4.0);
  const Field x = testing::ramp(ops, 1.0);
  // P1 interpolant of x is exact; integral of x^4 over (0, 1) is 1/5.
  EXPECT_NEAR(ops.lp_integral(x.values, 4.0), 0.2, 1e-14);
  EXPECT_NEAR(ops.lp_integral(x.values, 3.0), 0.25, 1e-14);
}

TEST(Operators, FreeRestrictionRoundTrip)
{
  const auto ops = unit_interval(7, 4.0);
  const Field x = testing::ramp(ops, 2.0);
  EXPECT_EQ(ops.free_count(), 7u);
  const Vector back = ops.extend_free(ops.restrict_free(x.values));
  EXPECT_EQ((back - x.values).norm(), 0.0);
}

}  // namespace
}  // namespace blowuplab
