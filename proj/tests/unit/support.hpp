#pragma once

#include "blowuplab/mesh.hpp"
#include "blowuplab/operators.hpp"
#include "blowuplab/problem.hpp"
#include "blowuplab/trajectory.hpp"

#include <gtest/gtest.h>

#include <functional>

namespace blowuplab::testing {

inline ProblemSpec interval_spec(double p, double length = 1.0, Side gamma0 = Side::Left)
{
  ProblemSpec spec;
  spec.dim = 1;
  spec.length_x = length;
  spec.gamma0_side = gamma0;
  spec.p = p;
  return spec;
}

inline DiscreteOperators unit_interval(int cells, double p, double length = 1.0, Side gamma0 = Side::Left)
{
  const ProblemSpec spec = interval_spec(p, length, gamma0);
  return assemble_operators(build_interval_mesh(length, cells, gamma0), spec);
}

/// Nodal interpolant of f.
inline Field nodal(const DiscreteOperators& ops, const std::function<double(double, double)>& f)
{
  Field u;
  u.values.resize(static_cast<Eigen::Index>(ops.size()));
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto& x = ops.mesh().nodes[i];
    u.values(static_cast<Eigen::Index>(i)) = f(x[0], x[1]);
  }
  return u;
}

inline Field ramp(const DiscreteOperators& ops, double amplitude)
{
  return nodal(ops, [amplitude](double x, double) { return amplitude * x; });
}

inline Field zero(const DiscreteOperators& ops)
{
  return nodal(ops, [](double, double) { return 0.0; });
}

#define EXPECT_ERROR_KIND(stmt, expected)                                 \
  do {                                                                    \
    try {                                                                 \
      stmt;                                                               \
      ADD_FAILURE() << "expected " << ::blowuplab::to_string(expected);   \
    } catch (const ::blowuplab::Error& e) {                               \
      EXPECT_EQ(e.kind(), expected) << e.what();                          \
    }                                                                     \
  } while (0)

}  // namespace blowuplab::testing
