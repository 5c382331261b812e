#pragma once

#include "blowuplab/problem.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace blowuplab {

using Index = std::int64_t;

enum class NodeTag : std::uint8_t { Interior, Gamma0, Gamma1 };

/// Parameters a structured mesh was built from; enough to rebuild or refine it.
struct MeshParams {
  int dim = 1;
  double length_x = 1.0;
  double length_y = 0.0;
  int cells_x = 1;
  int cells_y = 0;
  Side gamma0_side = Side::Left;
  EdgeSet gamma0_edges{};
};

/// Structured mesh of an interval (P1 cells) or a rectangle (Q1 cells).
///
/// Every boundary node is tagged Gamma0 or Gamma1; nodes shared by a Gamma0 edge and a
/// Gamma1 edge are tagged Gamma0. Gamma1 faces keep the full edges so the boundary
/// measure stays exact.
struct Mesh {
  int dim = 1;
  std::vector<std::array<double, 2>> nodes;
  /// Cell connectivity; only the first nodes_per_cell() entries are meaningful.
  /// Q1 ordering is counter-clockwise starting at the lower-left corner.
  std::vector<std::array<Index, 4>> cells;
  /// Gamma1 boundary faces. In 1D a face is a single point (second entry is -1).
  std::vector<std::array<Index, 2>> gamma1_faces;
  std::vector<NodeTag> tags;
  std::vector<Index> gamma0_nodes;
  std::vector<Index> gamma1_nodes;
  double h = 0.0;
  MeshParams params;

  [[nodiscard]] std::size_t node_count() const { return nodes.size(); }
  [[nodiscard]] std::size_t cell_count() const { return cells.size(); }
  [[nodiscard]] int nodes_per_cell() const { return dim == 1 ? 2 : 4; }
  [[nodiscard]] bool is_gamma0(Index node) const { return tags[static_cast<std::size_t>(node)] == NodeTag::Gamma0; }
  [[nodiscard]] double measure() const;

  /// Same geometry and partition with every cell count doubled (nested space).
  [[nodiscard]] Mesh refined() const;

  /// Short deterministic description used to tie fields to the mesh they live on.
  [[nodiscard]] std::string fingerprint() const;
};

/// Throws ErrorKind::InvalidMesh for cells == 0 or length <= 0.
Mesh build_interval_mesh(double length, int cells, Side gamma0_side);

/// Throws ErrorKind::InvalidMesh for nonpositive extents or counts and
/// ErrorKind::InvalidPartition for an empty Gamma0 edge set.
Mesh build_rectangle_mesh(double length_x, double length_y, int cells_x, int cells_y, EdgeSet gamma0_edges);

Mesh build_mesh(const MeshParams& params);

/// Mesh for a problem spec; cells_y is ignored in 1D.
Mesh build_mesh(const ProblemSpec& spec, int cells_x, int cells_y = 0);

}  // namespace blowuplab
