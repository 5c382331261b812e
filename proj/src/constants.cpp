#include "blowuplab/constants.hpp"

#include "blowuplab/error.hpp"
#include "blowuplab/problem.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <array>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

namespace blowuplab {
namespace {

using Solver = Eigen::SimplicialLDLT<SparseMatrix>;

void factorize(Solver& solver, const SparseMatrix& a)
{
  solver.compute(a);
  require(solver.info() == Eigen::Success, ErrorKind::Solver, "stiffness factorization failed");
}

double a_norm(const SparseMatrix& a, const Vector& x) { return std::sqrt(x.dot(a * x)); }

/// Uniform double in [0, 1) from the raw engine output; identical on every platform.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Largest eigenvalue of R v = lambda A v by power iteration on A^{-1} R.
ConstantEstimate generalized_power(const DiscreteOperators& ops, const SparseMatrix& r, Vector x,
                                   const EstimatorOptions& opts)
{
  const SparseMatrix& a = ops.stiffness_free();
  Solver solver;
  factorize(solver, a);

  ConstantEstimate est;
  x /= a_norm(a, x);
  double lambda = x.dot(r * x);
  for (int it = 1; it <= opts.max_iterations; ++it) {
    Vector y = solver.solve(r * x);
    const double norm = a_norm(a, y);
    if (norm == 0.0) {
      est.value = 0.0;
      est.iterations = it;
      est.maximizer = x;
      return est;
    }
    x = y / norm;
    const double next = x.dot(r * x);
    const double change = std::abs(next - lambda);
    lambda = next;
    if (change <= opts.eigen_tolerance * std::abs(lambda)) {
      est.value = lambda;
      est.iterations = it;
      est.maximizer = x;
      return est;
    }
  }
  throw ConvergenceError("power iteration did not reach the eigenvalue tolerance", lambda, opts.max_iterations);
}

/// Scale-invariant objective on the free nodes, handled through its logarithm.
struct LogObjective {
  std::function<double(const Vector&)> value;
  /// Gradient of value() with respect to the free coefficients.
  std::function<Vector(const Vector&)> gradient;
  /// Dense Hessian of value().
  std::function<Eigen::MatrixXd(const Vector&)> hessian;
};

struct AscentResult {
  Vector x;
  double log_value = 0.0;
  int iterations = 0;
  /// sqrt(g^T A^{-1} g) at x.
  double gradient_norm = 0.0;
};

double dual_norm(const Solver& solver, const Vector& g) { return std::sqrt(std::max(0.0, g.dot(solver.solve(g)))); }

/// Dual gradient norm below which a quiet ascent counts as stationary.
constexpr double kStationaryGradient = 1e-8;

/// L-BFGS ascent with the stiffness matrix as initial metric. The objective is invariant
/// under scaling, so the iterate moves freely and is renormalized to the unit stiffness
/// sphere when its norm drifts (the curvature memory is reset then).
AscentResult lbfgs_ascent(const LogObjective& f, const Solver& solver, const SparseMatrix& a, Vector x,
                          const EstimatorOptions& opts)
{
  constexpr std::size_t kMemory = 12;
  x /= a_norm(a, x);
  double value = f.value(x);
  Vector g = f.gradient(x);
  std::vector<Vector> s_hist;
  std::vector<Vector> y_hist;
  std::vector<double> rho_hist;
  int quiet = 0;
  int it = 0;
  while (it < opts.ascent_iterations) {
    ++it;
    // Two-loop recursion for the ascent direction of -value.
    Vector q = -g;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t i = s_hist.size(); i-- > 0;) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    Vector r = solver.solve(q);
    if (!s_hist.empty()) {
      const Vector& y = y_hist.back();
      r *= s_hist.back().dot(y) / y.dot(solver.solve(y));
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(r);
      r += s_hist[i] * (alpha[i] - beta);
    }
    Vector dir = -r;
    double slope = g.dot(dir);
    if (!(slope > 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = solver.solve(g);
      slope = g.dot(dir);
      if (!(slope > 1e-30)) {
        break;
      }
    }

    double step = 1.0;
    if (s_hist.empty()) {
      step = std::min(1.0, 0.1 / std::sqrt(slope));
    }
    Vector trial;
    double trial_value = value;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      trial = x + step * dir;
      trial_value = f.value(trial);
      if (std::isfinite(trial_value) && trial_value >= value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      break;
    }
    const Vector trial_g = f.gradient(trial);
    const Vector s_k = trial - x;
    const Vector y_k = g - trial_g;  // gradient change of -value
    const double sy = s_k.dot(y_k);
    const double change = trial_value - value;
    x = trial;
    value = trial_value;
    g = trial_g;
    if (sy > 1e-300) {
      s_hist.push_back(s_k);
      y_hist.push_back(y_k);
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > kMemory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
    }
    const double norm = a_norm(a, x);
    if (std::abs(norm - 1.0) > 0.1) {
      x /= norm;
      g = f.gradient(x);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }
    quiet = change < opts.objective_tolerance ? quiet + 1 : 0;
    if (quiet >= 3) {
      break;
    }
  }
  x /= a_norm(a, x);
  return {x, f.value(x), it, dual_norm(solver, f.gradient(x))};
}

/// Newton iteration on the stationarity condition restricted to the tangent space of the
/// stiffness sphere: [H  Ax; (Ax)^T  0] [dx; mu] = [-g; 0]. Steps that lower the objective
/// are rejected, so the result never falls below the ascent value.
AscentResult newton_polish(const LogObjective& f, const Solver& solver, const SparseMatrix& a, AscentResult start)
{
  AscentResult best = start;
  const Eigen::Index n = best.x.size();
  for (int it = 0; it < 30 && best.gradient_norm > 1e-14; ++it) {
    const Vector g = f.gradient(best.x);
    const Vector ax = a * best.x;
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + 1, n + 1);
    kkt.topLeftCorner(n, n) = f.hessian(best.x);
    kkt.topRightCorner(n, 1) = ax;
    kkt.bottomLeftCorner(1, n) = ax.transpose();
    Vector rhs = Vector::Zero(n + 1);
    rhs.head(n) = -g;
    const Vector sol = kkt.partialPivLu().solve(rhs);
    if (!sol.allFinite()) {
      break;
    }
    // Damped step: accept on objective gain, or on a smaller gradient without loss.
    bool accepted = false;
    for (double damp = 1.0; damp > 1e-3 && !accepted; damp *= 0.5) {
      Vector trial = best.x + damp * sol.head(n);
      const double norm = a_norm(a, trial);
      if (!(norm > 0.0)) {
        continue;
      }
      trial /= norm;
      const double value = f.value(trial);
      if (!std::isfinite(value)) {
        continue;
      }
      const double grad = dual_norm(solver, f.gradient(trial));
      const double slack = 1e-15 * std::abs(best.log_value);
      const bool gain = value > best.log_value + slack;
      const bool flatter = value >= best.log_value - slack && grad < best.gradient_norm;
      if (gain || flatter) {
        best.x = trial;
        best.log_value = value;
        best.gradient_norm = grad;
        accepted = true;
      }
    }
    if (!accepted) {
      break;
    }
    ++best.iterations;
  }
  return best;
}

/// Largest free-node count for which the dense Newton polish is attempted.
constexpr Eigen::Index kDensePolishLimit = 3000;

/// Alternations of Newton polish and renewed ascent per restart.
constexpr int kPolishRounds = 40;

/// Distances from each free node to the closest node of a set.
Vector distance_to(const DiscreteOperators& ops, const std::vector<Index>& targets)
{
  const Mesh& mesh = ops.mesh();
  Vector dist(static_cast<Eigen::Index>(ops.free_count()));
  for (std::size_t i = 0; i < ops.free_count(); ++i) {
    const auto& x = mesh.nodes[static_cast<std::size_t>(ops.free_nodes()[i])];
    double best = std::numeric_limits<double>::infinity();
    for (Index t : targets) {
      const auto& y = mesh.nodes[static_cast<std::size_t>(t)];
      best = std::min(best, std::hypot(x[0] - y[0], x[1] - y[1]));
    }
    dist(static_cast<Eigen::Index>(i)) = best;
  }
  return dist;
}

/// Restart seeds: principal eigenvector, a boundary-layer bump at Gamma1, a ramp away from
/// Gamma0, then seeded random smooth nonnegative fields.
std::vector<Vector> restart_seeds(const DiscreteOperators& ops, const EstimatorOptions& opts,
                                  std::vector<std::uint64_t>& seeds_used)
{
  const auto n = static_cast<Eigen::Index>(ops.free_count());
  std::vector<Vector> seeds;

  EstimatorOptions eig = opts;
  eig.eigen_tolerance = 1e-8;
  seeds.push_back(generalized_power(ops, ops.mass_free(), Vector::Ones(n), eig).maximizer.cwiseAbs());

  const Vector ramp = distance_to(ops, ops.mesh().gamma0_nodes);
  const double extent = std::max(ramp.maxCoeff(), 1e-300);
  if (!ops.mesh().gamma1_nodes.empty()) {
    const Vector to_gamma1 = distance_to(ops, ops.mesh().gamma1_nodes);
    const double width = 0.1 * extent;
    Vector bump(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      bump(i) = ramp(i) * std::exp(-to_gamma1(i) / width);
    }
    seeds.push_back(bump);
  } else {
    Vector bump(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = ramp(i) / extent;
      bump(i) = s * s;
    }
    seeds.push_back(bump);
  }
  seeds.push_back(ramp);

  for (int k = static_cast<int>(seeds.size()); k < opts.restarts; ++k) {
    const std::uint64_t s = opts.seed + static_cast<std::uint64_t>(k);
    std::mt19937_64 rng(s);
    std::array<double, 6> c{};
    for (double& cj : c) {
      cj = uniform01(rng);
    }
    Vector v = Vector::Zero(n);
    for (std::size_t j = 0; j < c.size(); ++j) {
      v += c[j] * (ramp / extent * ((static_cast<double>(j) + 0.5) * std::numbers::pi)).array().sin().matrix();
    }
    seeds.push_back(v.cwiseAbs());
    seeds_used.push_back(s);
  }
  seeds.resize(static_cast<std::size_t>(std::max(opts.restarts, 1)));
  return seeds;
}

ConstantEstimate multistart(const DiscreteOperators& ops, const LogObjective& f,
                            const std::function<double(double)>& to_constant, const EstimatorOptions& opts)
{
  const SparseMatrix& a = ops.stiffness_free();
  Solver solver;
  factorize(solver, a);

  ConstantEstimate est;
  const std::vector<Vector> seeds = restart_seeds(ops, opts, est.seeds);
  double best = -std::numeric_limits<double>::infinity();
  double best_gradient = 0.0;
  int best_iterations = 0;
  for (const Vector& seed : seeds) {
    Vector x = seed;
    if (!(a_norm(a, x) > 0.0)) {
      continue;
    }
    x /= a_norm(a, x);
    est.seed_values.push_back(to_constant(f.value(x)));
    AscentResult r = lbfgs_ascent(f, solver, a, x, opts);
    int used = r.iterations;
    for (int round = 0; round < kPolishRounds && r.gradient_norm > kStationaryGradient; ++round) {
      if (r.x.size() <= kDensePolishLimit) {
        r = newton_polish(f, solver, a, r);
      }
      if (r.gradient_norm <= kStationaryGradient || used >= opts.ascent_iterations) {
        break;
      }
      r = lbfgs_ascent(f, solver, a, r.x, opts);
      used += r.iterations;
    }
    r.iterations = used;
    est.restart_values.push_back(to_constant(r.log_value));
    est.iterations += r.iterations;
    if (r.gradient_norm > kStationaryGradient) {
      ++est.unconverged_restarts;
    }
    if (r.log_value > best) {
      best = r.log_value;
      best_gradient = r.gradient_norm;
      best_iterations = r.iterations;
      est.maximizer = r.x;
    }
  }
  if (best_gradient > kStationaryGradient) {
    throw ConvergenceError("maximizer search stagnated away from a stationary point", to_constant(best),
                           best_iterations);
  }
  require(std::isfinite(best), ErrorKind::Convergence, "no restart produced a finite objective");
  est.value = to_constant(best);
  if (est.maximizer.size() > 0 && est.maximizer.sum() < 0.0) {
    est.maximizer = -est.maximizer;
  }
  return est;
}

void add_richardson(ConstantEstimate& est, const DiscreteOperators& ops,
                    const std::function<ConstantEstimate(const DiscreteOperators&)>& solve)
{
  const DiscreteOperators fine(ops.mesh().refined(), ops.spec());
  const ConstantEstimate refined = solve(fine);
  est.refined_value = refined.value;
  est.error_estimate = (refined.value - est.value) * 4.0 / 3.0;
}

EstimatorOptions without_richardson(EstimatorOptions opts)
{
  opts.richardson = false;
  return opts;
}

}  // namespace

ConstantEstimate estimate_S2(const DiscreteOperators& ops, const EstimatorOptions& opts)
{
  const auto n = static_cast<Eigen::Index>(ops.free_count());
  ConstantEstimate est = generalized_power(ops, ops.mass_free(), Vector::Ones(n), opts);
  if (opts.richardson) {
    add_richardson(est, ops, [&](const DiscreteOperators& fine) { return estimate_S2(fine, without_richardson(opts)); });
  }
  return est;
}

ConstantEstimate estimate_S1(const DiscreteOperators& ops, const EstimatorOptions& opts)
{
  const SparseMatrix& b = ops.boundary_mass_free();
  if (b.nonZeros() == 0) {
    ConstantEstimate est;
    est.empty_trace_warning = true;
    est.maximizer = Vector::Zero(static_cast<Eigen::Index>(ops.free_count()));
    return est;
  }
  const auto n = static_cast<Eigen::Index>(ops.free_count());
  Solver solver;
  factorize(solver, ops.stiffness_free());
  const Vector start = solver.solve(b * Vector::Ones(n));
  ConstantEstimate est = generalized_power(ops, b, start, opts);
  if (opts.richardson) {
    add_richardson(est, ops, [&](const DiscreteOperators& fine) { return estimate_S1(fine, without_richardson(opts)); });
  }
  return est;
}

ConstantEstimate estimate_B1(const DiscreteOperators& ops, double p, const EstimatorOptions& opts)
{
  require(p > 2.0, ErrorKind::Domain, "B1 is estimated for p > 2 only");
  const SparseMatrix& a = ops.stiffness_free();
  // log of |w|_p^p / |grad w|^p; the constant is its p-th root.
  LogObjective f;
  f.value = [&](const Vector& x) {
    const double q = ops.lp_integral(ops.extend_free(x), p);
    return q > 0.0 ? std::log(q) - 0.5 * p * std::log(x.dot(a * x)) : -std::numeric_limits<double>::infinity();
  };
  f.gradient = [&](const Vector& x) {
    const Vector full = ops.extend_free(x);
    const double q = ops.lp_integral(full, p);
    const Vector ax = a * x;
    return Vector(p * ops.restrict_free(ops.source(full, p)) / q - p * ax / x.dot(ax));
  };
  f.hessian = [&](const Vector& x) {
    const Vector full = ops.extend_free(x);
    const double q = ops.lp_integral(full, p);
    const Vector fx = ops.restrict_free(ops.source(full, p));
    const Vector ax = a * x;
    const double xax = x.dot(ax);
    Eigen::MatrixXd h = Eigen::MatrixXd(ops.restrict_free(ops.source_weight(full, p))) * (p * (p - 1.0) / q);
    h -= (p * p / (q * q)) * fx * fx.transpose();
    h -= (p / xax) * Eigen::MatrixXd(a);
    h += (2.0 * p / (xax * xax)) * ax * ax.transpose();
    return h;
  };
  ConstantEstimate est = multistart(ops, f, [p](double log_value) { return std::exp(log_value / p); }, opts);
  if (opts.richardson) {
    add_richardson(est, ops, [&](const DiscreteOperators& fine) { return estimate_B1(fine, p, without_richardson(opts)); });
  }
  return est;
}

ConstantEstimate estimate_S3_GN(const DiscreteOperators& ops, double p, int n, const EstimatorOptions& opts)
{
  require(p >= 2.0, ErrorKind::Domain, "Gagliardo-Nirenberg constant needs p >= 2");
  require(p < 2.0 + 4.0 / n, ErrorKind::Domain, "Gagliardo-Nirenberg constant needs p < 2 + 4/n");
  if (p == 2.0) {
    ConstantEstimate est;
    est.value = 1.0;
    est.refined_value = 1.0;
    est.maximizer = Vector::Zero(static_cast<Eigen::Index>(ops.free_count()));
    return est;
  }
  const double sigma = gagliardo_nirenberg_sigma(p, n);
  const double e_mass = 0.5 * p * (1.0 - sigma);
  const double e_grad = 0.5 * p * sigma;
  const SparseMatrix& a = ops.stiffness_free();
  const SparseMatrix& m = ops.mass_free();
  LogObjective f;
  f.value = [&](const Vector& x) {
    const double q = ops.lp_integral(ops.extend_free(x), p);
    if (!(q > 0.0)) {
      return -std::numeric_limits<double>::infinity();
    }
    return std::log(q) - e_mass * std::log(x.dot(m * x)) - e_grad * std::log(x.dot(a * x));
  };
  f.gradient = [&](const Vector& x) {
    const Vector full = ops.extend_free(x);
    const double q = ops.lp_integral(full, p);
    const Vector mx = m * x;
    const Vector ax = a * x;
    return Vector(p * ops.restrict_free(ops.source(full, p)) / q - 2.0 * e_mass * mx / x.dot(mx) -
                  2.0 * e_grad * ax / x.dot(ax));
  };
  f.hessian = [&](const Vector& x) {
    const Vector full = ops.extend_free(x);
    const double q = ops.lp_integral(full, p);
    const Vector fx = ops.restrict_free(ops.source(full, p));
    const Vector mx = m * x;
    const Vector ax = a * x;
    const double xmx = x.dot(mx);
    const double xax = x.dot(ax);
    Eigen::MatrixXd h = Eigen::MatrixXd(ops.restrict_free(ops.source_weight(full, p))) * (p * (p - 1.0) / q);
    h -= (p * p / (q * q)) * fx * fx.transpose();
    h -= (2.0 * e_mass / xmx) * Eigen::MatrixXd(m);
    h += (4.0 * e_mass / (xmx * xmx)) * mx * mx.transpose();
    h -= (2.0 * e_grad / xax) * Eigen::MatrixXd(a);
    h += (4.0 * e_grad / (xax * xax)) * ax * ax.transpose();
    return h;
  };
  ConstantEstimate est = multistart(ops, f, [](double log_value) { return std::exp(log_value); }, opts);
  if (opts.richardson) {
    add_richardson(est, ops,
                   [&](const DiscreteOperators& fine) { return estimate_S3_GN(fine, p, n, without_richardson(opts)); });
  }
  return est;
}

double well_depth_d(double B1, double p)
{
  require(p > 2.0, ErrorKind::Domain, "potential well depth needs p > 2");
  require(B1 > 0.0 && std::isfinite(B1), ErrorKind::Domain, "potential well depth needs a positive finite B1");
  return (0.5 - 1.0 / p) * std::pow(B1, -2.0 * p / (p - 2.0));
}

double gagliardo_nirenberg_sigma(double p, int n) { return n * (p - 2.0) / (2.0 * p); }

DerivedConstants derived_constants(double S1, double S2, std::optional<double> S3, double p, int n)
{
  require(p > 2.0, ErrorKind::Domain, "derived constants need p > 2");
  DerivedConstants d;
  d.sigma_gn = gagliardo_nirenberg_sigma(p, n);
  d.A = p * (S1 + S2) / (p - 2.0);
  if (S3) {
    require(p < 2.0 + 4.0 / n, ErrorKind::Domain, "S4 and C~ need p < 2 + 4/n");
    const double ps = p * d.sigma_gn;
    d.S4 = std::pow(*S3, 2.0 / (2.0 - ps)) * std::pow(2.0, (p - ps) / (2.0 - ps));
    d.C_tilde = (2.0 - ps) / (*d.S4 * (p - 2.0)) * std::pow(2.0, (p - 2.0) / (2.0 - ps));
  }
  return d;
}

double SobolevConstants::d() const
{
  require(B1.has_value(), ErrorKind::NotApplicable, "d is defined for p > 2 only");
  return well_depth_d(B1->value, p);
}

double SobolevConstants::b2_threshold() const
{
  require(p > 2.0, ErrorKind::NotApplicable, "the second blow-up set is defined for p > 2 only");
  return (p - 2.0) / (2.0 * p * (S1.value + S2.value));
}

SobolevConstants estimate_constants(const DiscreteOperators& ops, const EstimatorOptions& opts)
{
  SobolevConstants c;
  c.p = ops.spec().p;
  c.n = ops.spec().dim;
  c.options = opts;
  c.S2 = estimate_S2(ops, opts);
  c.S1 = estimate_S1(ops, opts);
  if (c.p > 2.0) {
    c.B1 = estimate_B1(ops, c.p, opts);
    std::optional<double> s3;
    if (c.p < 2.0 + 4.0 / c.n) {
      c.S3 = estimate_S3_GN(ops, c.p, c.n, opts);
      s3 = c.S3->value;
    }
    c.derived = derived_constants(c.S1.value, c.S2.value, s3, c.p, c.n);
  } else {
    c.derived.sigma_gn = 0.0;
    c.derived.A = std::numeric_limits<double>::infinity();
  }
  return c;
}

SobolevConstants make_constants(double p, int n, double S1, double S2, std::optional<double> B1,
                                std::optional<double> S3)
{
  SobolevConstants c;
  c.p = p;
  c.n = n;
  c.S1.value = S1;
  c.S2.value = S2;
  if (B1) {
    c.B1 = ConstantEstimate{};
    c.B1->value = *B1;
  }
  if (S3) {
    c.S3 = ConstantEstimate{};
    c.S3->value = *S3;
  }
  if (p > 2.0) {
    c.derived = derived_constants(S1, S2, S3, p, n);
  }
  return c;
}

}  // namespace blowuplab
