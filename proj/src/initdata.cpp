#include "blowuplab/initdata.hpp"

#include "blowuplab/error.hpp"
#include "blowuplab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace blowuplab {
namespace {

constexpr double kPi = std::numbers::pi;

std::array<double, 2> extents(const Mesh& mesh)
{
  return {mesh.params.length_x, mesh.dim == 2 ? mesh.params.length_y : 0.0};
}

double distance_to_gamma0(const Mesh& mesh, const std::array<double, 2>& x)
{
  const auto [lx, ly] = extents(mesh);
  if (mesh.dim == 1) {
    return mesh.params.gamma0_side == Side::Left ? x[0] : lx - x[0];
  }
  const EdgeSet& edges = mesh.params.gamma0_edges;
  double best = std::numeric_limits<double>::infinity();
  if (edges.contains(Edge::Left)) best = std::min(best, x[0]);
  if (edges.contains(Edge::Right)) best = std::min(best, lx - x[0]);
  if (edges.contains(Edge::Bottom)) best = std::min(best, x[1]);
  if (edges.contains(Edge::Top)) best = std::min(best, ly - x[1]);
  return best;
}

double max_distance_to_gamma0(const Mesh& mesh)
{
  double m = 0.0;
  for (const auto& x : mesh.nodes) {
    m = std::max(m, distance_to_gamma0(mesh, x));
  }
  return m;
}

/// exp(1 - 1/(1 - r^2)) for |r| < 1, else 0; peak 1 at r = 0.
double smooth_bump(double r)
{
  const double q = 1.0 - r * r;
  return q > 0.0 ? std::exp(1.0 - 1.0 / q) : 0.0;
}

/// Local coordinate of x in the region along axis i, in [0, 1] inside.
double local(const Region& g, const std::array<double, 2>& x, int i)
{
  return (x[static_cast<std::size_t>(i)] - g.lo[static_cast<std::size_t>(i)]) /
         (g.hi[static_cast<std::size_t>(i)] - g.lo[static_cast<std::size_t>(i)]);
}

double oscillatory_value(const Region& g, const std::array<double, 2>& x, int k, int dim)
{
  if (!g.contains(x, dim)) {
    return 0.0;
  }
  double v = std::sin(k * kPi * local(g, x, 0));
  if (dim == 2) {
    v *= std::sin(k * kPi * local(g, x, 1));
  }
  return v;
}

double region_bump_value(const Region& g, const std::array<double, 2>& x, int dim)
{
  if (!g.contains(x, dim)) {
    return 0.0;
  }
  double v = smooth_bump(2.0 * local(g, x, 0) - 1.0);
  if (dim == 2) {
    v *= smooth_bump(2.0 * local(g, x, 1) - 1.0);
  }
  return v;
}

/// Region inside the closed domain with positive extent.
void check_inside(const Region& g, const Mesh& mesh, const char* name)
{
  const auto ext = extents(mesh);
  for (int i = 0; i < mesh.dim; ++i) {
    const auto s = static_cast<std::size_t>(i);
    require(g.lo[s] < g.hi[s], ErrorKind::Placement, std::string(name) + " has empty extent");
    require(g.lo[s] >= 0.0 && g.hi[s] <= ext[s], ErrorKind::Placement, std::string(name) + " lies outside the domain");
  }
}

/// Two subdomains strictly interior, at least one cell from the boundary and from each other.
void check_pair(const Region& a, const Region& b, const Mesh& mesh, double min_width_cells)
{
  check_inside(a, mesh, "omega1");
  check_inside(b, mesh, "omega2");
  const auto ext = extents(mesh);
  const double h = mesh.h;
  double separation = 0.0;
  for (int i = 0; i < mesh.dim; ++i) {
    const auto s = static_cast<std::size_t>(i);
    for (const Region* g : {&a, &b}) {
      require(g->lo[s] >= h * (1.0 - 1e-12) && g->hi[s] <= ext[s] - h * (1.0 - 1e-12), ErrorKind::Placement,
              "subdomain closer than one cell to the boundary");
      require(g->hi[s] - g->lo[s] >= min_width_cells * h * (1.0 - 1e-12), ErrorKind::Placement,
              "subdomain narrower than the required number of cells");
    }
    separation = std::max(separation, std::max(a.lo[s] - b.hi[s], b.lo[s] - a.hi[s]));
  }
  require(separation >= h * (1.0 - 1e-12), ErrorKind::Placement, "subdomains overlap or are closer than one cell");
}

Vector interpolate(const DiscreteOperators& ops, const auto& profile)
{
  const Mesh& mesh = ops.mesh();
  Vector v(static_cast<Eigen::Index>(mesh.node_count()));
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    v(static_cast<Eigen::Index>(i)) = mesh.is_gamma0(static_cast<Index>(i)) ? 0.0 : profile(mesh.nodes[i]);
  }
  return v;
}

}  // namespace

const char* to_string(Family family)
{
  switch (family) {
  case Family::Ramp: return "ramp";
  case Family::Bump: return "bump";
  case Family::Eigenmode: return "eigenmode";
  case Family::Oscillatory: return "oscillatory";
  case Family::TwoBump: return "two_bump";
  }
  return "unknown";
}

Family parse_family(const std::string& name)
{
  for (Family f : {Family::Ramp, Family::Bump, Family::Eigenmode, Family::Oscillatory, Family::TwoBump}) {
    if (name == to_string(f)) {
      return f;
    }
  }
  throw Error(ErrorKind::Config, "unknown initial-data family '" + name + "'");
}

bool Region::contains(const std::array<double, 2>& x, int dim) const
{
  for (int i = 0; i < dim; ++i) {
    const auto s = static_cast<std::size_t>(i);
    if (x[s] < lo[s] || x[s] > hi[s]) {
      return false;
    }
  }
  return true;
}

Region default_omega1(const Mesh& mesh)
{
  const auto [lx, ly] = extents(mesh);
  return {{0.1 * lx, 0.1 * ly}, {0.45 * lx, 0.9 * ly}};
}

Region default_omega2(const Mesh& mesh)
{
  const auto [lx, ly] = extents(mesh);
  return {{0.55 * lx, 0.1 * ly}, {0.9 * lx, 0.9 * ly}};
}

Field make_field(const InitialDataSpec& spec, const DiscreteOperators& ops)
{
  const Mesh& mesh = ops.mesh();
  const int dim = mesh.dim;
  Field f;
  switch (spec.family) {
  case Family::Ramp:
    f.values = interpolate(ops, [&](const auto& x) { return spec.amplitude * distance_to_gamma0(mesh, x); });
    break;
  case Family::Bump: {
    const auto ext = extents(mesh);
    for (int i = 0; i < dim; ++i) {
      const auto s = static_cast<std::size_t>(i);
      require(spec.center[s] >= 0.0 && spec.center[s] <= ext[s], ErrorKind::Placement, "bump center outside the domain");
    }
    require(spec.width > 0.0, ErrorKind::Placement, "bump width must be positive");
    f.values = interpolate(ops, [&](const auto& x) {
      const double dx = x[0] - spec.center[0];
      const double dy = dim == 2 ? x[1] - spec.center[1] : 0.0;
      return spec.amplitude * smooth_bump(std::hypot(dx, dy) / spec.width);
    });
    break;
  }
  case Family::Eigenmode: {
    require(spec.frequency >= 1, ErrorKind::Precondition, "eigenmode index must be >= 1");
    const double dmax = max_distance_to_gamma0(mesh);
    f.values = interpolate(ops, [&](const auto& x) {
      return spec.amplitude * std::sin((spec.frequency - 0.5) * kPi * distance_to_gamma0(mesh, x) / dmax);
    });
    break;
  }
  case Family::Oscillatory: {
    require(spec.frequency >= 1, ErrorKind::Precondition, "frequency must be >= 1");
    const Region g = spec.omega1.value_or(default_omega1(mesh));
    check_inside(g, mesh, "omega1");
    f.values = interpolate(ops, [&](const auto& x) { return spec.amplitude * oscillatory_value(g, x, spec.frequency, dim); });
    break;
  }
  case Family::TwoBump: {
    require(spec.frequency >= 1, ErrorKind::Precondition, "frequency must be >= 1");
    const Region g1 = spec.omega1.value_or(default_omega1(mesh));
    const Region g2 = spec.omega2.value_or(default_omega2(mesh));
    check_pair(g1, g2, mesh, 1.0);
    f.values = interpolate(ops, [&](const auto& x) {
      return spec.amplitude2 * oscillatory_value(g1, x, spec.frequency, dim) + spec.amplitude * region_bump_value(g2, x, dim);
    });
    break;
  }
  }
  return f;
}

Field random_smooth_field(const DiscreteOperators& ops, std::uint64_t seed, int modes)
{
  require(modes >= 1, ErrorKind::Precondition, "need at least one mode");
  const Mesh& mesh = ops.mesh();
  std::mt19937_64 rng(seed);
  std::vector<double> c(static_cast<std::size_t>(modes));
  for (double& cj : c) {
    cj = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }
  c[0] += 0.5;
  const double dmax = max_distance_to_gamma0(mesh);
  Field f;
  f.values = interpolate(ops, [&](const auto& x) {
    const double s = distance_to_gamma0(mesh, x) / dmax;
    double v = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
      v += c[j] * std::sin((static_cast<double>(j) + 0.5) * kPi * s);
    }
    return std::max(v, 0.0);
  });
  const double sup = f.values.lpNorm<Eigen::Infinity>();
  if (sup > 0.0) {
    f.values /= sup;
  }
  return f;
}

Field scale_into_B1(const Field& w, const SobolevConstants& consts, const DiscreteOperators& ops, double p,
                    double level)
{
  require(p > 2.0, ErrorKind::Domain, "B1 scaling needs p > 2");
  require(level < 1.0, ErrorKind::Precondition, "B1 scaling needs level < 1");
  const double a = 0.5 * ops.stiffness_form(w.values);
  const double b = ops.lp_integral(w.values, p) / p;
  require(a > 0.0 && b > 0.0, ErrorKind::Precondition, "B1 scaling needs a nonzero field");
  const double target = level * consts.d();
  auto J = [&](double s) { return a * s * s - b * std::pow(s, p); };
  // J decreases beyond the maximizing scale, where K changes sign.
  double lo = std::pow(2.0 * a / (p * b), 1.0 / (p - 2.0));
  double hi = 2.0 * lo;
  while (J(hi) > target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (J(mid) > target ? lo : hi) = mid;
  }
  Field u;
  u.values = hi * w.values;
  const Classification c = classify_initial(u, consts, ops, p);
  require(c.in_B1, ErrorKind::Construction, "scaled field misses strict B1 membership");
  return u;
}

Field scale_into_B2(const Field& w, const SobolevConstants& consts, const DiscreteOperators& ops, double p,
                    double factor)
{
  require(p > 2.0, ErrorKind::Domain, "B2 scaling needs p > 2");
  require(factor > 1.0, ErrorKind::Precondition, "B2 scaling needs factor > 1");
  const double a = 0.5 * ops.stiffness_form(w.values);
  const double b = ops.lp_integral(w.values, p) / p;
  require(a > 0.0 && b > 0.0, ErrorKind::Precondition, "B2 scaling needs a nonzero field");
  const double X = ops.mass_form(w.values) + ops.boundary_form(w.values);
  const double gap = a - consts.b2_threshold() * X;
  require(gap > 0.0, ErrorKind::Construction, "B2 scaling found a nonpositive energy gap");
  Field u;
  u.values = std::pow(factor * gap / b, 1.0 / (p - 2.0)) * w.values;
  const Classification c = classify_initial(u, consts, ops, p);
  require(c.in_B2, ErrorKind::Construction, "scaled field misses strict B2 membership");
  return u;
}

EnergyConstruction construct_energy_level(double a, const SobolevConstants& consts, const DiscreteOperators& ops,
                                          double p, std::optional<Region> omega1, std::optional<Region> omega2)
{
  require(p > 2.0, ErrorKind::Domain, "energy-level construction needs p > 2");
  require(std::isfinite(a), ErrorKind::Precondition, "target energy must be finite");
  const Mesh& mesh = ops.mesh();
  const int dim = mesh.dim;
  const Region g1 = omega1.value_or(default_omega1(mesh));
  const Region g2 = omega2.value_or(default_omega2(mesh));
  check_pair(g1, g2, mesh, 4.0);

  EnergyConstruction out;
  out.target = a;
  const double theta = (p - 2.0) / (2.0 * p * (consts.S1.value + consts.S2.value));

  // Bump on Omega2, scaled so theta r^2 |w|_2^2 exceeds a by half a unit of max(1, |a|).
  const Vector w = interpolate(ops, [&](const auto& x) { return region_bump_value(g2, x, dim); });
  const double w_mass = ops.mass_form(w);
  require(w_mass > 0.0, ErrorKind::Placement, "omega2 contains no free node");
  const double scale = std::max(1.0, std::abs(a));
  out.r = std::sqrt((std::max(a, 0.0) + 0.5 * scale) / (theta * w_mass));
  const Vector rw = out.r * w;
  out.J_bump = 0.5 * ops.stiffness_form(rw) - ops.lp_integral(rw, p) / p;
  const double remainder = a - out.J_bump;

  // J(s v_k) = alpha s^2 - beta s^p for the oscillatory piece.
  int k_cap = std::max(1, static_cast<int>((g1.hi[0] - g1.lo[0]) / mesh.h / 4.0));
  k_cap = std::min(k_cap, 400);
  for (int k = 1; k <= k_cap; ++k) {
    const Vector v = interpolate(ops, [&](const auto& x) { return oscillatory_value(g1, x, k, dim); });
    const double alpha = 0.5 * ops.stiffness_form(v);
    const double beta = ops.lp_integral(v, p) / p;
    if (!(alpha > 0.0 && beta > 0.0)) {
      continue;
    }
    auto J_of = [&](double s) { return alpha * s * s - beta * std::pow(s, p); };
    const double s_peak = std::pow(2.0 * alpha / (p * beta), 1.0 / (p - 2.0));
    const double peak = J_of(s_peak);

    double lo = 0.0;
    double hi = 0.0;
    bool increasing = true;
    if (remainder > 0.0) {
      if (peak <= remainder) {
        continue;
      }
      lo = 0.0;
      hi = s_peak;
    } else {
      increasing = false;
      lo = s_peak;
      hi = 2.0 * s_peak;
      for (int grow = 0; grow < 200 && J_of(hi) > remainder; ++grow) {
        hi *= 2.0;
      }
      require(J_of(hi) <= remainder, ErrorKind::Construction, "could not bracket the oscillatory amplitude");
    }
    for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      const bool above = J_of(mid) > remainder;
      if (above == increasing) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    const double s = 0.5 * (lo + hi);
    out.s = s;
    out.k = k;
    const Vector sv = s * v;
    out.J_oscillatory = 0.5 * ops.stiffness_form(sv) - ops.lp_integral(sv, p) / p;
    out.u0.values = sv + rw;
    out.achieved = energy_J(out.u0, ops, p);
    require(std::abs(out.achieved - a) <= 1e-6 * scale, ErrorKind::Construction,
            "root-found field misses the target energy");
    out.classification = classify_initial(out.u0, consts, ops, p);
    require(out.classification.in_B2, ErrorKind::Construction, "constructed field is not strictly in B2");
    return out;
  }
  throw Error(ErrorKind::Construction,
              "no frequency up to " + std::to_string(k_cap) + " reaches the energy " + std::to_string(remainder) +
                  " on omega1");
}

}  // namespace blowuplab
