#include "blowuplab/problem.hpp"

#include "blowuplab/error.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace blowuplab {

int EdgeSet::count() const
{
  return std::popcount(bits_);
}

std::string EdgeSet::to_string() const
{
  std::string out;
  for (Edge e : {Edge::Left, Edge::Right, Edge::Bottom, Edge::Top}) {
    if (contains(e)) {
      if (!out.empty()) {
        out += ',';
      }
      out += blowuplab::to_string(e);
    }
  }
  return out;
}

EdgeSet EdgeSet::parse(const std::string& text)
{
  EdgeSet set;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) {
      continue;
    }
    if (item == "left") {
      set.bits_ |= static_cast<std::uint8_t>(Edge::Left);
    } else if (item == "right") {
      set.bits_ |= static_cast<std::uint8_t>(Edge::Right);
    } else if (item == "bottom") {
      set.bits_ |= static_cast<std::uint8_t>(Edge::Bottom);
    } else if (item == "top") {
      set.bits_ |= static_cast<std::uint8_t>(Edge::Top);
    } else {
      throw Error(ErrorKind::Config, "unknown edge '" + item + "'");
    }
  }
  return set;
}

Side parse_side(const std::string& text)
{
  if (text == "left") {
    return Side::Left;
  }
  if (text == "right") {
    return Side::Right;
  }
  throw Error(ErrorKind::Config, "gamma0 side must be 'left' or 'right', got '" + text + "'");
}

const char* to_string(Side side)
{
  return side == Side::Left ? "left" : "right";
}

const char* to_string(Edge edge)
{
  switch (edge) {
  case Edge::Left: return "left";
  case Edge::Right: return "right";
  case Edge::Bottom: return "bottom";
  case Edge::Top: return "top";
  }
  return "?";
}

double critical_sobolev_exponent(int n)
{
  if (n <= 2) {
    return std::numeric_limits<double>::infinity();
  }
  return 2.0 * n / (n - 2.0);
}

double max_admissible_exponent(int n)
{
  return 1.0 + critical_sobolev_exponent(n) / 2.0;
}

double ProblemSpec::max_exponent() const
{
  return max_admissible_exponent(dim);
}

void ProblemSpec::validate() const
{
  require(dim == 1 || dim == 2, ErrorKind::InvalidProblem, "dimension must be 1 or 2");
  require(length_x > 0.0 && std::isfinite(length_x), ErrorKind::InvalidProblem, "length_x must be positive");
  if (dim == 2) {
    require(length_y > 0.0 && std::isfinite(length_y), ErrorKind::InvalidProblem, "length_y must be positive");
    require(!gamma0_edges.empty(), ErrorKind::InvalidPartition, "gamma0 must contain at least one edge");
  }
  require(std::isfinite(p) && p >= 2.0, ErrorKind::InvalidProblem, "source exponent p must satisfy p >= 2");
  require(p <= max_exponent(), ErrorKind::InvalidProblem, "source exponent exceeds 1 + 2*/2");
}

std::string ProblemSpec::describe() const
{
  std::ostringstream out;
  out.precision(17);
  if (dim == 1) {
    out << "interval L=" << length_x << " gamma0=" << to_string(gamma0_side);
  } else {
    out << "rectangle " << length_x << "x" << length_y << " gamma0=" << gamma0_edges.to_string();
  }
  out << " p=" << p;
  return out.str();
}

}  // namespace blowuplab
