#pragma once

#include "blowuplab/analysis.hpp"
#include "blowuplab/constants.hpp"
#include "blowuplab/operators.hpp"
#include "blowuplab/trajectory.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace blowuplab {

enum class Family { Ramp, Bump, Eigenmode, Oscillatory, TwoBump };

const char* to_string(Family family);
/// Throws ErrorKind::Config for an unknown name.
Family parse_family(const std::string& name);

/// Axis-aligned closed box; only the x extent is used in 1D.
struct Region {
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};

  [[nodiscard]] bool contains(const std::array<double, 2>& x, int dim) const;
};

/// Default subdomains: [0.1, 0.45] and [0.55, 0.9] of each extent (full 0.1..0.9 in y).
Region default_omega1(const Mesh& mesh);
Region default_omega2(const Mesh& mesh);

struct InitialDataSpec {
  Family family = Family::Ramp;
  double amplitude = 1.0;
  /// Frequency k for eigenmode (sin((k - 1/2) pi s)) and oscillatory (sin(k pi xhat)).
  int frequency = 1;
  /// Bump center and radius.
  std::array<double, 2> center{0.5, 0.5};
  double width = 0.25;
  std::optional<Region> omega1;
  std::optional<Region> omega2;
  /// two_bump: amplitude of the oscillatory piece on Omega1 (amplitude scales the bump on Omega2).
  double amplitude2 = 1.0;
};

/// Nodal interpolant of the profile, zeroed on Gamma0 nodes.
///   ramp         amplitude * distance to Gamma0
///   bump         amplitude * exp(1 - 1/(1 - r^2)), r = |x - center| / width
///   eigenmode    amplitude * sin((k - 1/2) pi s), s = distance to Gamma0 / its maximum
///   oscillatory  amplitude * sin(k pi xhat) on Omega1 (product form in 2D), zero elsewhere
///   two_bump     amplitude2 * oscillatory on Omega1 + amplitude * smooth bump filling Omega2
/// Throws ErrorKind::Placement for a center or subdomain outside the domain, or overlapping
/// subdomains closer than one cell.
Field make_field(const InitialDataSpec& spec, const DiscreteOperators& ops);

/// Smooth nonnegative field sum_j c_j sin((j - 1/2) pi s) with seeded coefficients in [0, 1),
/// s as for eigenmode; scaled to unit sup-norm.
Field random_smooth_field(const DiscreteOperators& ops, std::uint64_t seed, int modes = 4);

/// Multiple s w with s beyond the Nehari scale and J(s w) = level * d, so s w lies in B1.
/// Throws ErrorKind::Precondition for level >= 1 or a zero field and ErrorKind::Construction
/// when the result misses strict B1 membership.
Field scale_into_B1(const Field& w, const SobolevConstants& consts, const DiscreteOperators& ops, double p,
                    double level);

/// Multiple s w with s^{p-2} = factor (|grad w|^2/2 - theta X(w)) / (|w|_p^p / p), theta the
/// B2 coefficient, so s w lies in B2 for factor > 1.
Field scale_into_B2(const Field& w, const SobolevConstants& consts, const DiscreteOperators& ops, double p,
                    double factor);

struct EnergyConstruction {
  Field u0;
  double target = 0.0;
  double achieved = 0.0;
  /// Scale of the bump on Omega2 and its energy.
  double r = 0.0;
  double J_bump = 0.0;
  /// Amplitude and frequency of the oscillatory piece on Omega1 and its energy.
  double s = 0.0;
  int k = 0;
  double J_oscillatory = 0.0;
  Classification classification;
};

/// Field with J(u0) = a within 1e-6 max(1, |a|) and strict B2 membership: a scaled bump on
/// Omega2 fixes the B2 margin, then s sin(k pi xhat) on Omega1 is root-found so the energies
/// add up to a, raising k until the target is reachable.
/// Throws ErrorKind::Placement for bad subdomains (width below 4 cells, overlap) and
/// ErrorKind::Construction when no frequency up to the mesh limit reaches the target.
EnergyConstruction construct_energy_level(double a, const SobolevConstants& consts, const DiscreteOperators& ops,
                                          double p, std::optional<Region> omega1 = std::nullopt,
                                          std::optional<Region> omega2 = std::nullopt);

}  // namespace blowuplab
