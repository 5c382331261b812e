#pragma once

#include <vector>

namespace blowuplab {

/// Gauss-Legendre rule on the unit interval [0, 1]; exact for polynomials of degree 2n-1.
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const { return points.size(); }
};

GaussRule gauss_legendre(int n_points);

/// Points per direction used for the nonlinear integrands: ceil(p) + 1.
int source_quadrature_points(double p);

}  // namespace blowuplab
