#pragma once

#include "blowuplab/mesh.hpp"
#include "blowuplab/problem.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace blowuplab {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Quadrature points and shape values shared by all cells, plus per-cell scaled weights.
struct QuadratureTable {
  int points_per_direction = 0;
  /// shape(q, a): value of local basis function a at quadrature point q.
  Eigen::MatrixXd shape;
  /// weights[c * nq + q] = reference weight times the cell Jacobian.
  std::vector<double> weights;

  [[nodiscard]] Eigen::Index points_per_cell() const { return shape.rows(); }
};

/// Assembled discrete bilinear forms of the weak formulation.
///
/// mass()          (u, v)          interior L2 product, consistent
/// stiffness()     (grad u, grad v)
/// boundary_mass() (u, v)_{Gamma1} trace product; in 1D the point evaluation at the Gamma1 end
///
/// Full matrices act on every node. The *_free() variants are restricted to the nodes not
/// on Gamma0, which is where the Dirichlet constraint is eliminated.
class DiscreteOperators {
public:
  DiscreteOperators(Mesh mesh, ProblemSpec spec);

  [[nodiscard]] const Mesh& mesh() const { return mesh_; }
  [[nodiscard]] const ProblemSpec& spec() const { return spec_; }
  [[nodiscard]] std::size_t size() const { return mesh_.node_count(); }

  [[nodiscard]] const SparseMatrix& mass() const { return mass_; }
  [[nodiscard]] const SparseMatrix& stiffness() const { return stiffness_; }
  [[nodiscard]] const SparseMatrix& boundary_mass() const { return boundary_mass_; }
  [[nodiscard]] const SparseMatrix& mass_free() const { return mass_free_; }
  [[nodiscard]] const SparseMatrix& stiffness_free() const { return stiffness_free_; }
  [[nodiscard]] const SparseMatrix& boundary_mass_free() const { return boundary_mass_free_; }

  [[nodiscard]] const std::vector<Index>& free_nodes() const { return free_nodes_; }
  [[nodiscard]] std::size_t free_count() const { return free_nodes_.size(); }
  [[nodiscard]] Vector restrict_free(const Vector& full) const;
  /// Inverse of restrict_free; Gamma0 entries are exactly zero.
  [[nodiscard]] Vector extend_free(const Vector& reduced) const;

  [[nodiscard]] const QuadratureTable& quadrature() const { return quadrature_; }
  [[nodiscard]] int quadrature_points() const { return quadrature_.points_per_direction; }

  /// Quadrature value of the integral of |u|^p over the domain.
  [[nodiscard]] double lp_integral(const Vector& u, double p) const;
  /// Load vector F_i = integral of |u|^{p-2} u phi_i (full length).
  [[nodiscard]] Vector source(const Vector& u, double p) const;
  /// D_ij = integral of |u|^{p-2} phi_i phi_j, so that dF/du = (p-1) D (full size).
  [[nodiscard]] SparseMatrix source_weight(const Vector& u, double p) const;
  /// Rows and columns of the free nodes of a full-size matrix.
  [[nodiscard]] SparseMatrix restrict_free(const SparseMatrix& full) const;

  /// Quadratic forms on full-length vectors.
  [[nodiscard]] double mass_form(const Vector& u) const { return u.dot(mass_ * u); }
  [[nodiscard]] double stiffness_form(const Vector& u) const { return u.dot(stiffness_ * u); }
  [[nodiscard]] double boundary_form(const Vector& u) const { return u.dot(boundary_mass_ * u); }

  /// Table for a given number of points per direction (built on demand when it differs
  /// from the stored one).
  [[nodiscard]] QuadratureTable make_quadrature(int points_per_direction) const;

private:
  [[nodiscard]] const QuadratureTable& table_for(double p, QuadratureTable& scratch) const;

  Mesh mesh_;
  ProblemSpec spec_;
  SparseMatrix mass_;
  SparseMatrix stiffness_;
  SparseMatrix boundary_mass_;
  SparseMatrix mass_free_;
  SparseMatrix stiffness_free_;
  SparseMatrix boundary_mass_free_;
  std::vector<Index> free_nodes_;
  std::vector<Index> free_index_;
  QuadratureTable quadrature_;
};

/// Assembles M, A and B with P1 (1D) / Q1 (2D) elements. The nonlinear quadrature uses
/// ceil(p) + 1 Gauss points per direction.
DiscreteOperators assemble_operators(const Mesh& mesh, const ProblemSpec& spec);

}  // namespace blowuplab
