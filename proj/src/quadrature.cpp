#include "blowuplab/quadrature.hpp"

#include "blowuplab/error.hpp"

#include <cmath>
#include <numbers>

namespace blowuplab {

GaussRule gauss_legendre(int n_points)
{
  require(n_points >= 1 && n_points <= 64, ErrorKind::Domain, "Gauss rule size must be in [1, 64]");

  GaussRule rule;
  rule.points.resize(static_cast<std::size_t>(n_points));
  rule.weights.resize(static_cast<std::size_t>(n_points));
  const int n = n_points;

  // Newton on P_n from the Chebyshev-like initial guess, roots on [-1, 1].
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);

    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.points[lo] = 0.5 * (1.0 - x);
    rule.points[hi] = 0.5 * (1.0 + x);
    rule.weights[lo] = 0.5 * w;
    rule.weights[hi] = 0.5 * w;
  }
  if (n % 2 == 1) {
    rule.points[static_cast<std::size_t>(n / 2)] = 0.5;
  }
  return rule;
}

int source_quadrature_points(double p)
{
  return static_cast<int>(std::ceil(p)) + 1;
}

}  // namespace blowuplab
