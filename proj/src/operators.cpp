#include "blowuplab/operators.hpp"

#include "blowuplab/error.hpp"
#include "blowuplab/quadrature.hpp"

#include <cmath>

namespace blowuplab {
namespace {

using Triplet = Eigen::Triplet<double>;

struct ReferenceCell {
  Eigen::MatrixXd shape;  // nq x nen
  Eigen::MatrixXd dxi;    // d/dxi
  Eigen::MatrixXd deta;   // d/deta (2D only)
  std::vector<double> weights;
};

ReferenceCell reference_cell(int dim, int n_points)
{
  const GaussRule rule = gauss_legendre(n_points);
  ReferenceCell ref;
  if (dim == 1) {
    const auto nq = static_cast<Eigen::Index>(rule.size());
    ref.shape.resize(nq, 2);
    ref.dxi.resize(nq, 2);
    for (Eigen::Index q = 0; q < nq; ++q) {
      const double xi = rule.points[static_cast<std::size_t>(q)];
      ref.shape(q, 0) = 1.0 - xi;
      ref.shape(q, 1) = xi;
      ref.dxi(q, 0) = -1.0;
      ref.dxi(q, 1) = 1.0;
      ref.weights.push_back(rule.weights[static_cast<std::size_t>(q)]);
    }
    return ref;
  }

  const auto n = static_cast<Eigen::Index>(rule.size());
  ref.shape.resize(n * n, 4);
  ref.dxi.resize(n * n, 4);
  ref.deta.resize(n * n, 4);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index q = j * n + i;
      const double xi = rule.points[static_cast<std::size_t>(i)];
      const double eta = rule.points[static_cast<std::size_t>(j)];
      ref.shape.row(q) << (1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta;
      ref.dxi.row(q) << -(1 - eta), (1 - eta), eta, -eta;
      ref.deta.row(q) << -(1 - xi), -xi, xi, (1 - xi);
      ref.weights.push_back(rule.weights[static_cast<std::size_t>(i)] * rule.weights[static_cast<std::size_t>(j)]);
    }
  }
  return ref;
}

/// Cell extents; cells are axis aligned so the Jacobian is diagonal.
std::array<double, 2> cell_extent(const Mesh& mesh, const std::array<Index, 4>& cell)
{
  const auto& a = mesh.nodes[static_cast<std::size_t>(cell[0])];
  if (mesh.dim == 1) {
    const auto& b = mesh.nodes[static_cast<std::size_t>(cell[1])];
    return {b[0] - a[0], 1.0};
  }
  const auto& c = mesh.nodes[static_cast<std::size_t>(cell[2])];
  return {c[0] - a[0], c[1] - a[1]};
}

SparseMatrix from_triplets(Eigen::Index n, const std::vector<Triplet>& triplets)
{
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

SparseMatrix restrict_matrix(const SparseMatrix& full, const std::vector<Index>& free_index, Eigen::Index n_free)
{
  std::vector<Triplet> triplets;
  for (Eigen::Index col = 0; col < full.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(full, col); it; ++it) {
      const Index r = free_index[static_cast<std::size_t>(it.row())];
      const Index c = free_index[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) {
        triplets.emplace_back(r, c, it.value());
      }
    }
  }
  return from_triplets(n_free, triplets);
}

}  // namespace

DiscreteOperators::DiscreteOperators(Mesh mesh, ProblemSpec spec) : mesh_(std::move(mesh)), spec_(spec)
{
  spec_.validate();
  require(mesh_.dim == spec_.dim, ErrorKind::Precondition, "mesh dimension does not match the problem");
  require(mesh_.params.length_x == spec_.length_x && (mesh_.dim == 1 || mesh_.params.length_y == spec_.length_y),
          ErrorKind::Precondition, "mesh extents do not match the problem");
  require(!mesh_.gamma0_nodes.empty(), ErrorKind::InvalidPartition, "gamma0 has no nodes");

  const auto n = static_cast<Eigen::Index>(mesh_.node_count());
  const int nen = mesh_.nodes_per_cell();

  // Bilinear forms: two points per direction integrate P1/Q1 products exactly.
  const ReferenceCell ref = reference_cell(mesh_.dim, 2);
  std::vector<Triplet> m_trip;
  std::vector<Triplet> a_trip;
  for (const auto& cell : mesh_.cells) {
    const auto [hx, hy] = cell_extent(mesh_, cell);
    const double jac = mesh_.dim == 1 ? hx : hx * hy;
    Eigen::MatrixXd me = Eigen::MatrixXd::Zero(nen, nen);
    Eigen::MatrixXd ae = Eigen::MatrixXd::Zero(nen, nen);
    for (Eigen::Index q = 0; q < ref.shape.rows(); ++q) {
      const double w = ref.weights[static_cast<std::size_t>(q)] * jac;
      const Eigen::RowVectorXd phi = ref.shape.row(q);
      const Eigen::RowVectorXd gx = ref.dxi.row(q) / hx;
      me += w * phi.transpose() * phi;
      ae += w * gx.transpose() * gx;
      if (mesh_.dim == 2) {
        const Eigen::RowVectorXd gy = ref.deta.row(q) / hy;
        ae += w * gy.transpose() * gy;
      }
    }
    for (int a = 0; a < nen; ++a) {
      for (int b = 0; b < nen; ++b) {
        m_trip.emplace_back(cell[static_cast<std::size_t>(a)], cell[static_cast<std::size_t>(b)], me(a, b));
        a_trip.emplace_back(cell[static_cast<std::size_t>(a)], cell[static_cast<std::size_t>(b)], ae(a, b));
      }
    }
  }

  std::vector<Triplet> b_trip;
  if (mesh_.dim == 1) {
    for (const auto& face : mesh_.gamma1_faces) {
      b_trip.emplace_back(face[0], face[0], 1.0);
    }
  } else {
    for (const auto& face : mesh_.gamma1_faces) {
      const auto& a = mesh_.nodes[static_cast<std::size_t>(face[0])];
      const auto& b = mesh_.nodes[static_cast<std::size_t>(face[1])];
      const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
      b_trip.emplace_back(face[0], face[0], len / 3.0);
      b_trip.emplace_back(face[1], face[1], len / 3.0);
      b_trip.emplace_back(face[0], face[1], len / 6.0);
      b_trip.emplace_back(face[1], face[0], len / 6.0);
    }
  }

  mass_ = from_triplets(n, m_trip);
  stiffness_ = from_triplets(n, a_trip);
  boundary_mass_ = from_triplets(n, b_trip);

  free_index_.assign(mesh_.node_count(), -1);
  for (std::size_t i = 0; i < mesh_.node_count(); ++i) {
    if (!mesh_.is_gamma0(static_cast<Index>(i))) {
      free_index_[i] = static_cast<Index>(free_nodes_.size());
      free_nodes_.push_back(static_cast<Index>(i));
    }
  }
  const auto n_free = static_cast<Eigen::Index>(free_nodes_.size());
  mass_free_ = restrict_matrix(mass_, free_index_, n_free);
  stiffness_free_ = restrict_matrix(stiffness_, free_index_, n_free);
  boundary_mass_free_ = restrict_matrix(boundary_mass_, free_index_, n_free);

  quadrature_ = make_quadrature(source_quadrature_points(spec_.p));
}

QuadratureTable DiscreteOperators::make_quadrature(int points_per_direction) const
{
  const ReferenceCell ref = reference_cell(mesh_.dim, points_per_direction);
  QuadratureTable table;
  table.points_per_direction = points_per_direction;
  table.shape = ref.shape;
  const std::size_t nq = ref.weights.size();
  table.weights.resize(mesh_.cell_count() * nq);
  for (std::size_t c = 0; c < mesh_.cell_count(); ++c) {
    const auto [hx, hy] = cell_extent(mesh_, mesh_.cells[c]);
    const double jac = mesh_.dim == 1 ? hx : hx * hy;
    for (std::size_t q = 0; q < nq; ++q) {
      table.weights[c * nq + q] = ref.weights[q] * jac;
    }
  }
  return table;
}

const QuadratureTable& DiscreteOperators::table_for(double p, QuadratureTable& scratch) const
{
  const int needed = source_quadrature_points(p);
  if (needed <= quadrature_.points_per_direction) {
    return quadrature_;
  }
  scratch = make_quadrature(needed);
  return scratch;
}

Vector DiscreteOperators::restrict_free(const Vector& full) const
{
  require(full.size() == static_cast<Eigen::Index>(size()), ErrorKind::Precondition, "vector length mismatch");
  Vector reduced(static_cast<Eigen::Index>(free_nodes_.size()));
  for (std::size_t i = 0; i < free_nodes_.size(); ++i) {
    reduced(static_cast<Eigen::Index>(i)) = full(free_nodes_[i]);
  }
  return reduced;
}

Vector DiscreteOperators::extend_free(const Vector& reduced) const
{
  require(reduced.size() == static_cast<Eigen::Index>(free_nodes_.size()), ErrorKind::Precondition,
          "reduced vector length mismatch");
  Vector full = Vector::Zero(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < free_nodes_.size(); ++i) {
    full(free_nodes_[i]) = reduced(static_cast<Eigen::Index>(i));
  }
  return full;
}

double DiscreteOperators::lp_integral(const Vector& u, double p) const
{
  QuadratureTable scratch;
  const QuadratureTable& table = table_for(p, scratch);
  const Eigen::Index nq = table.points_per_cell();
  const int nen = mesh_.nodes_per_cell();
  const bool even_int = (p == std::round(p)) && static_cast<long>(p) % 2 == 0 && p <= 16;
  const int ip = static_cast<int>(p);

  double total = 0.0;
  for (std::size_t c = 0; c < mesh_.cell_count(); ++c) {
    const auto& cell = mesh_.cells[c];
    for (Eigen::Index q = 0; q < nq; ++q) {
      double uq = 0.0;
      for (int a = 0; a < nen; ++a) {
        uq += table.shape(q, a) * u(cell[static_cast<std::size_t>(a)]);
      }
      double val;
      if (even_int) {
        val = 1.0;
        for (int k = 0; k < ip; ++k) {
          val *= uq;
        }
      } else {
        val = std::pow(std::abs(uq), p);
      }
      total += table.weights[c * static_cast<std::size_t>(nq) + static_cast<std::size_t>(q)] * val;
    }
  }
  return total;
}

Vector DiscreteOperators::source(const Vector& u, double p) const
{
  QuadratureTable scratch;
  const QuadratureTable& table = table_for(p, scratch);
  const Eigen::Index nq = table.points_per_cell();
  const int nen = mesh_.nodes_per_cell();

  Vector f = Vector::Zero(u.size());
  for (std::size_t c = 0; c < mesh_.cell_count(); ++c) {
    const auto& cell = mesh_.cells[c];
    for (Eigen::Index q = 0; q < nq; ++q) {
      double uq = 0.0;
      for (int a = 0; a < nen; ++a) {
        uq += table.shape(q, a) * u(cell[static_cast<std::size_t>(a)]);
      }
      const double g = (p == 2.0) ? uq : std::pow(std::abs(uq), p - 2.0) * uq;
      const double wg = table.weights[c * static_cast<std::size_t>(nq) + static_cast<std::size_t>(q)] * g;
      for (int a = 0; a < nen; ++a) {
        f(cell[static_cast<std::size_t>(a)]) += wg * table.shape(q, a);
      }
    }
  }
  return f;
}

SparseMatrix DiscreteOperators::source_weight(const Vector& u, double p) const
{
  QuadratureTable scratch;
  const QuadratureTable& table = table_for(p, scratch);
  const Eigen::Index nq = table.points_per_cell();
  const int nen = mesh_.nodes_per_cell();

  std::vector<Triplet> triplets;
  triplets.reserve(mesh_.cell_count() * static_cast<std::size_t>(nen * nen));
  for (std::size_t c = 0; c < mesh_.cell_count(); ++c) {
    const auto& cell = mesh_.cells[c];
    Eigen::MatrixXd de = Eigen::MatrixXd::Zero(nen, nen);
    for (Eigen::Index q = 0; q < nq; ++q) {
      double uq = 0.0;
      for (int a = 0; a < nen; ++a) {
        uq += table.shape(q, a) * u(cell[static_cast<std::size_t>(a)]);
      }
      const double g = (p == 2.0) ? 1.0 : std::pow(std::abs(uq), p - 2.0);
      const double wg = table.weights[c * static_cast<std::size_t>(nq) + static_cast<std::size_t>(q)] * g;
      de += wg * table.shape.row(q).transpose() * table.shape.row(q);
    }
    for (int a = 0; a < nen; ++a) {
      for (int b = 0; b < nen; ++b) {
        triplets.emplace_back(cell[static_cast<std::size_t>(a)], cell[static_cast<std::size_t>(b)], de(a, b));
      }
    }
  }
  return from_triplets(static_cast<Eigen::Index>(size()), triplets);
}

SparseMatrix DiscreteOperators::restrict_free(const SparseMatrix& full) const
{
  require(full.rows() == static_cast<Eigen::Index>(size()) && full.cols() == full.rows(), ErrorKind::Precondition,
          "matrix size mismatch");
  return restrict_matrix(full, free_index_, static_cast<Eigen::Index>(free_nodes_.size()));
}

DiscreteOperators assemble_operators(const Mesh& mesh, const ProblemSpec& spec)
{
  return DiscreteOperators(mesh, spec);
}

}  // namespace blowuplab
