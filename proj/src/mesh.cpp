#include "blowuplab/mesh.hpp"

#include "blowuplab/error.hpp"

#include <cmath>
#include <sstream>

namespace blowuplab {

double Mesh::measure() const
{
  return dim == 1 ? params.length_x : params.length_x * params.length_y;
}

Mesh Mesh::refined() const
{
  MeshParams fine = params;
  fine.cells_x *= 2;
  fine.cells_y *= 2;
  return build_mesh(fine);
}

std::string Mesh::fingerprint() const
{
  std::ostringstream out;
  out.precision(17);
  if (dim == 1) {
    out << "interval L=" << params.length_x << " N=" << params.cells_x << " gamma0=" << to_string(params.gamma0_side);
  } else {
    out << "rectangle Lx=" << params.length_x << " Ly=" << params.length_y << " Nx=" << params.cells_x
        << " Ny=" << params.cells_y << " gamma0=" << params.gamma0_edges.to_string();
  }
  return out.str();
}

Mesh build_interval_mesh(double length, int cells, Side gamma0_side)
{
  require(cells >= 1, ErrorKind::InvalidMesh, "interval mesh needs at least one cell");
  require(length > 0.0 && std::isfinite(length), ErrorKind::InvalidMesh, "interval length must be positive");

  Mesh mesh;
  mesh.dim = 1;
  mesh.params = MeshParams{1, length, 0.0, cells, 0, gamma0_side, {}};
  mesh.h = length / cells;

  const auto n_nodes = static_cast<std::size_t>(cells) + 1;
  mesh.nodes.resize(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    // Exact endpoint even when L/N is not representable.
    const double x = (i + 1 == n_nodes) ? length : length * static_cast<double>(i) / cells;
    mesh.nodes[i] = {x, 0.0};
  }
  mesh.cells.resize(static_cast<std::size_t>(cells));
  for (Index c = 0; c < cells; ++c) {
    mesh.cells[static_cast<std::size_t>(c)] = {c, c + 1, -1, -1};
  }

  mesh.tags.assign(n_nodes, NodeTag::Interior);
  const Index left = 0;
  const Index right = cells;
  const Index g0 = gamma0_side == Side::Left ? left : right;
  const Index g1 = gamma0_side == Side::Left ? right : left;
  mesh.tags[static_cast<std::size_t>(g0)] = NodeTag::Gamma0;
  mesh.tags[static_cast<std::size_t>(g1)] = NodeTag::Gamma1;
  mesh.gamma0_nodes = {g0};
  mesh.gamma1_nodes = {g1};
  mesh.gamma1_faces = {{g1, -1}};
  return mesh;
}

Mesh build_rectangle_mesh(double length_x, double length_y, int cells_x, int cells_y, EdgeSet gamma0_edges)
{
  require(cells_x >= 1 && cells_y >= 1, ErrorKind::InvalidMesh, "rectangle mesh needs positive cell counts");
  require(length_x > 0.0 && length_y > 0.0 && std::isfinite(length_x) && std::isfinite(length_y),
          ErrorKind::InvalidMesh, "rectangle extents must be positive");
  require(!gamma0_edges.empty(), ErrorKind::InvalidPartition, "gamma0 edge set is empty");

  Mesh mesh;
  mesh.dim = 2;
  mesh.params = MeshParams{2, length_x, length_y, cells_x, cells_y, Side::Left, gamma0_edges};
  const double hx = length_x / cells_x;
  const double hy = length_y / cells_y;
  mesh.h = std::hypot(hx, hy);

  const Index nx = cells_x + 1;
  const Index ny = cells_y + 1;
  const auto id = [nx](Index i, Index j) { return j * nx + i; };

  mesh.nodes.resize(static_cast<std::size_t>(nx * ny));
  for (Index j = 0; j < ny; ++j) {
    const double y = (j == cells_y) ? length_y : length_y * static_cast<double>(j) / cells_y;
    for (Index i = 0; i < nx; ++i) {
      const double x = (i == cells_x) ? length_x : length_x * static_cast<double>(i) / cells_x;
      mesh.nodes[static_cast<std::size_t>(id(i, j))] = {x, y};
    }
  }

  mesh.cells.reserve(static_cast<std::size_t>(cells_x) * static_cast<std::size_t>(cells_y));
  for (Index j = 0; j < cells_y; ++j) {
    for (Index i = 0; i < cells_x; ++i) {
      mesh.cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }

  // Boundary faces per edge, in a fixed order.
  std::vector<std::pair<Edge, std::array<Index, 2>>> faces;
  for (Index i = 0; i < cells_x; ++i) {
    faces.push_back({Edge::Bottom, {id(i, 0), id(i + 1, 0)}});
  }
  for (Index j = 0; j < cells_y; ++j) {
    faces.push_back({Edge::Right, {id(cells_x, j), id(cells_x, j + 1)}});
  }
  for (Index i = 0; i < cells_x; ++i) {
    faces.push_back({Edge::Top, {id(i, cells_y), id(i + 1, cells_y)}});
  }
  for (Index j = 0; j < cells_y; ++j) {
    faces.push_back({Edge::Left, {id(0, j), id(0, j + 1)}});
  }

  mesh.tags.assign(mesh.nodes.size(), NodeTag::Interior);
  for (const auto& [edge, face] : faces) {
    if (!gamma0_edges.contains(edge)) {
      mesh.gamma1_faces.push_back(face);
      for (Index n : face) {
        if (mesh.tags[static_cast<std::size_t>(n)] == NodeTag::Interior) {
          mesh.tags[static_cast<std::size_t>(n)] = NodeTag::Gamma1;
        }
      }
    }
  }
  // Gamma0 wins at corners shared with a Gamma1 edge.
  for (const auto& [edge, face] : faces) {
    if (gamma0_edges.contains(edge)) {
      for (Index n : face) {
        mesh.tags[static_cast<std::size_t>(n)] = NodeTag::Gamma0;
      }
    }
  }

  for (std::size_t n = 0; n < mesh.tags.size(); ++n) {
    if (mesh.tags[n] == NodeTag::Gamma0) {
      mesh.gamma0_nodes.push_back(static_cast<Index>(n));
    } else if (mesh.tags[n] == NodeTag::Gamma1) {
      mesh.gamma1_nodes.push_back(static_cast<Index>(n));
    }
  }
  return mesh;
}

Mesh build_mesh(const MeshParams& params)
{
  if (params.dim == 1) {
    return build_interval_mesh(params.length_x, params.cells_x, params.gamma0_side);
  }
  require(params.dim == 2, ErrorKind::InvalidMesh, "only 1D and 2D meshes are supported");
  return build_rectangle_mesh(params.length_x, params.length_y, params.cells_x, params.cells_y,
                              params.gamma0_edges);
}

Mesh build_mesh(const ProblemSpec& spec, int cells_x, int cells_y)
{
  if (spec.dim == 1) {
    return build_interval_mesh(spec.length_x, cells_x, spec.gamma0_side);
  }
  return build_rectangle_mesh(spec.length_x, spec.length_y, cells_x, cells_y, spec.gamma0_edges);
}

}  // namespace blowuplab
