#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <complex>
#include <memory>
#include <vector>

#include "dtn.hpp"
#include "herglotz.hpp"
#include "mesh.hpp"

namespace perisurf {

using cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<cplx>;

/// P1 space on a cell mesh with right-boundary nodes identified with their
/// left partners. "Periodic" vectors are indexed by the surviving nodes; the
/// surface nodes among them carry Dirichlet values, the rest are free.
class FemSpace {
 public:
  FemSpace(CellMesh mesh, double k);

  const CellMesh& mesh() const { return mesh_; }
  double k() const { return k_; }
  double period() const { return mesh_.period; }
  double height() const { return mesh_.height; }

  int periodic_count() const { return n_per_; }
  int free_count() const { return static_cast<int>(free_nodes_.size()); }
  int periodic_index(int node) const { return per_of_node_[node]; }
  int free_index(int periodic) const { return free_of_per_[periodic]; }
  /// Periodic indices of free dofs, in free-dof order.
  const std::vector<int>& free_periodic() const { return free_nodes_; }
  /// Surface dofs and top dofs as periodic indices, sorted by x1, right corner excluded.
  const std::vector<int>& surface_periodic() const { return surface_; }
  const std::vector<int>& top_periodic() const { return top_; }
  const std::vector<double>& top_x() const { return top_x_; }
  /// Representative mesh node of each periodic index.
  int node_of_periodic(int p) const { return node_of_per_[p]; }

  /// Real full-node matrices: stiffness and mass.
  const SpMat& stiffness() const { return K_; }
  const SpMat& mass() const { return Mass_; }

  /// exp(-i alpha L) on right-boundary nodes, 1 elsewhere.
  cplx phase(int node, double alpha) const;
  /// Periodic vector -> values on every mesh node of the reference cell.
  Eigen::VectorXcd expand(const Eigen::VectorXcd& periodic, double alpha) const;
  /// Adjoint of expand: sum conj-phased full-node entries into periodic slots.
  Eigen::VectorXcd collapse(const Eigen::VectorXcd& full, double alpha) const;

 private:
  CellMesh mesh_;
  double k_;
  int n_per_ = 0;
  std::vector<int> per_of_node_, node_of_per_, free_of_per_, free_nodes_, surface_, top_;
  std::vector<double> top_x_;
  SpMat K_, Mass_;
};

/// Factorized alpha-quasi-periodic system: stiffness - k^2 mass - DtN block,
/// restricted to free dofs.
class AlphaSystem {
 public:
  AlphaSystem(std::shared_ptr<const FemSpace> space, double alpha, const DtnConfig& dtn);
  AlphaSystem(const AlphaSystem&) = delete;
  AlphaSystem& operator=(const AlphaSystem&) = delete;

  double alpha() const { return alpha_; }
  const FemSpace& space() const { return *space_; }
  const DtnConfig& dtn() const { return dtn_; }

  /// Full operator on periodic vectors (rows = test functions).
  const SpMatC& matrix() const { return A_; }
  /// Dense DtN block on top dofs (rows/cols follow top_periodic()).
  Eigen::MatrixXcd dtn_block() const;
  /// F(a, j) = (1/L) int psi_a exp(-i xi_j x1) over the top boundary.
  const Eigen::MatrixXcd& top_projection() const { return F_; }

  /// Solves A_ff x = rhs on free dofs.
  Eigen::VectorXcd solve_free(const Eigen::VectorXcd& rhs) const;
  /// Solves for u with u = lifting on surface dofs and A u = load on free rows;
  /// lifting may be any periodic vector carrying the Dirichlet values.
  Eigen::VectorXcd solve(const Eigen::VectorXcd& load, const Eigen::VectorXcd& lifting) const;

  /// Load vector int f conj(psi_b) for f = sum_j c_j exp(i xi_j x1) on the top boundary.
  Eigen::VectorXcd mode_load(const Eigen::VectorXcd& mode_coeffs) const;
  /// Load of the total-field problem: f = d/dx2 u_i - T u_i on the top boundary.
  Eigen::VectorXcd incident_load(const IncidentModes& incident) const;

 private:
  std::shared_ptr<const FemSpace> space_;
  double alpha_;
  DtnConfig dtn_;
  SpMatC A_, Aff_;
  Eigen::MatrixXcd F_;
  std::unique_ptr<Eigen::SparseLU<SpMatC>> lu_;
};

/// Solves the quasi-periodic problem with Dirichlet values on the surface
/// (sorted like surface_periodic()) and a periodic load vector.
Eigen::VectorXcd solve_quasi_periodic_dirichlet(const AlphaSystem& sys, const Eigen::VectorXcd& surface_data,
                                                const Eigen::VectorXcd& load);

}  // namespace perisurf
