#pragma once

#include "blowuplab/operators.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace blowuplab {

struct EstimatorOptions {
  /// Relative eigenvalue change at which power iteration stops.
  double eigen_tolerance = 1e-10;
  /// Relative objective change at which the sphere ascent stops.
  double objective_tolerance = 1e-9;
  /// Power iteration cap.
  int max_iterations = 50000;
  /// L-BFGS iteration cap per restart; a dense Newton polish follows.
  int ascent_iterations = 20000;
  int restarts = 8;
  std::uint64_t seed = 20240601;
  /// Also solve on the h/2 mesh and report a Richardson error estimate.
  bool richardson = true;
};

/// One estimated optimal constant on the discrete (conforming) space.
struct ConstantEstimate {
  double value = 0.0;
  /// Richardson estimate (value(h/2) - value(h)) * 4/3 of the discretization error of value.
  double error_estimate = 0.0;
  std::optional<double> refined_value;
  int iterations = 0;
  /// Objective at each restart seed; every one is a certified lower bound of value.
  std::vector<double> seed_values;
  /// Objective each restart converged to.
  std::vector<double> restart_values;
  /// Restarts stopped below the best value without reaching a stationary point.
  int unconverged_restarts = 0;
  std::vector<std::uint64_t> seeds;
  /// Set when the trace form is identically zero (no Gamma1 nodes).
  bool empty_trace_warning = false;
  /// Maximizer on the free nodes, normalized to unit stiffness norm.
  Vector maximizer;
};

/// Largest eigenvalue of M v = lambda A v on the Gamma0-constrained space.
ConstantEstimate estimate_S2(const DiscreteOperators& ops, const EstimatorOptions& opts = {});

/// Largest eigenvalue of B v = lambda A v; 0 with a warning flag when Gamma1 is empty.
ConstantEstimate estimate_S1(const DiscreteOperators& ops, const EstimatorOptions& opts = {});

/// sup |w|_p / |grad w|_2. Requires p > 2.
ConstantEstimate estimate_B1(const DiscreteOperators& ops, double p, const EstimatorOptions& opts = {});

/// sup |w|_p^p / (|w|_2^{p(1-s)} |grad w|_2^{ps}), s = n(p-2)/(2p). Requires p < 2 + 4/n;
/// p = 2 returns exactly 1.
ConstantEstimate estimate_S3_GN(const DiscreteOperators& ops, double p, int n, const EstimatorOptions& opts = {});

/// d = (1/2 - 1/p) B1^{-2p/(p-2)}; throws ErrorKind::Domain for B1 <= 0 or p <= 2.
double well_depth_d(double B1, double p);

/// sigma = n(p-2)/(2p).
double gagliardo_nirenberg_sigma(double p, int n);

struct DerivedConstants {
  double sigma_gn = 0.0;
  double A = 0.0;
  std::optional<double> S4;
  std::optional<double> C_tilde;
};

/// A = p(S1+S2)/(p-2); S4 and C~ are filled when S3 is given, and then need p < 2 + 4/n.
DerivedConstants derived_constants(double S1, double S2, std::optional<double> S3, double p, int n);

/// Estimated constants for one discretized problem.
struct SobolevConstants {
  double p = 0.0;
  int n = 1;
  ConstantEstimate S1;
  ConstantEstimate S2;
  std::optional<ConstantEstimate> B1;
  std::optional<ConstantEstimate> S3;
  DerivedConstants derived;
  EstimatorOptions options;

  /// Recomputed from B1 on every call.
  [[nodiscard]] double d() const;
  [[nodiscard]] bool has_d() const { return B1.has_value(); }
  [[nodiscard]] double A() const { return derived.A; }
  /// (p-2) / (2p(S1+S2)), the coefficient in the second blow-up set.
  [[nodiscard]] double b2_threshold() const;
};

/// S1, S2 always; B1 (and d, A) when p > 2; S3 when 2 < p < 2 + 4/n.
SobolevConstants estimate_constants(const DiscreteOperators& ops, const EstimatorOptions& opts = {});

/// Constants built from given values (no estimation), mainly for formula checks.
SobolevConstants make_constants(double p, int n, double S1, double S2, std::optional<double> B1,
                                std::optional<double> S3 = std::nullopt);

}  // namespace blowuplab
