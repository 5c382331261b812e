#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>

namespace blowuplab {

/// Endpoint of the interval that carries the homogeneous Dirichlet condition.
enum class Side { Left, Right };

enum class Edge : std::uint8_t { Left = 1, Right = 2, Bottom = 4, Top = 8 };

/// Subset of the four rectangle edges.
class EdgeSet {
public:
  constexpr EdgeSet() = default;
  constexpr EdgeSet(std::initializer_list<Edge> edges)
  {
    for (Edge e : edges) {
      bits_ |= static_cast<std::uint8_t>(e);
    }
  }

  [[nodiscard]] constexpr bool contains(Edge e) const { return (bits_ & static_cast<std::uint8_t>(e)) != 0; }
  [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
  [[nodiscard]] constexpr bool all() const { return bits_ == 0x0F; }
  [[nodiscard]] int count() const;
  [[nodiscard]] std::string to_string() const;
  [[nodiscard]] constexpr std::uint8_t bits() const { return bits_; }

  /// Parses a comma separated list such as "left,bottom".
  static EdgeSet parse(const std::string& text);

  friend constexpr bool operator==(EdgeSet, EdgeSet) = default;

private:
  std::uint8_t bits_ = 0;
};

Side parse_side(const std::string& text);
const char* to_string(Side side);
const char* to_string(Edge edge);

/// Problem data: domain, boundary partition and source exponent.
///
/// Only the linear dissipation law (m = 2) is modeled. The exponent p = 2 is admitted
/// for the linear global-existence path; every blow-up entry point requires p > 2.
struct ProblemSpec {
  int dim = 1;
  double length_x = 1.0;
  double length_y = 1.0;
  Side gamma0_side = Side::Left;
  EdgeSet gamma0_edges{Edge::Left};
  double p = 4.0;

  static constexpr int dissipation_exponent = 2;

  /// Throws ErrorKind::InvalidProblem when a field is out of range.
  void validate() const;

  /// Upper admissible exponent 1 + 2*/2 (infinite for n = 1, 2).
  [[nodiscard]] double max_exponent() const;

  [[nodiscard]] std::string describe() const;
};

/// 2* = 2n/(n-2) for n >= 3, infinity otherwise.
double critical_sobolev_exponent(int n);

/// 1 + 2*/2.
double max_admissible_exponent(int n);

}  // namespace blowuplab
