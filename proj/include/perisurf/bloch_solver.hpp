#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "alpha_system.hpp"
#include "bloch_transform.hpp"
#include "diffeo.hpp"
#include "herglotz.hpp"

namespace perisurf {

/// Perturbation coupling b on one physical cell, as a real symmetric matrix
/// on the reference cell nodes: (A_p - I) stiffness minus k^2 (c_p - 1) mass.
struct CouplingBlock {
  int cell = 0;
  SpMat B;
  std::vector<int> support;  // nodes touched by B

  bool empty() const { return support.empty(); }
};

CouplingBlock assemble_coupling(const FemSpace& space, const DiffeoField& diffeo);

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

struct SolverTolerances {
  double tol = 1e-8;
  int max_iterations = 200;
  int restart = 60;
};

/// Trace on the surface nodes of one physical cell (both corners included).
struct SurfaceTrace {
  int cell = 0;
  std::vector<double> x1;  // cell-local abscissas
  Eigen::VectorXcd values;
};

/// The Bloch-coupled family over a quasimomentum grid. One factorized
/// AlphaSystem per node; a perturbation couples them through one cell.
class BlochSolver {
 public:
  BlochSolver(std::shared_ptr<const FemSpace> space, const QuasiMomentumGrid& grid, const DtnConfig& dtn,
              SolverTolerances tolerances = {});

  const FemSpace& space() const { return *space_; }
  std::shared_ptr<const FemSpace> space_ptr() const { return space_; }
  const QuasiMomentumGrid& grid() const { return grid_; }
  const DtnConfig& dtn() const { return dtn_; }
  const AlphaSystem& system(int i) const { return *systems_[i]; }
  int size() const { return grid_.size(); }

  /// Periodic loads (one column per alpha node) of the Herglotz total-field problem.
  Eigen::MatrixXcd incident_loads(const HerglotzDensity& density) const;

  /// General solve: periodic loads per alpha, optional coupling, optional
  /// Dirichlet values (reference-cell node vector, zero at the cell corners)
  /// prescribed on the surface of physical cell `cell` and zero on all others.
  BlochField solve(const Eigen::MatrixXcd& loads, const CouplingBlock* coupling,
                   const Eigen::VectorXcd* dirichlet, int cell, SolveStats* stats = nullptr) const;

  BlochField solve_unperturbed(const HerglotzDensity& density) const;
  BlochField solve_perturbed(const HerglotzDensity& density, const DiffeoField& diffeo,
                             SolveStats* stats = nullptr) const;

  /// Inverse Bloch transform onto every reference node of physical cell j.
  Eigen::VectorXcd physical_cell(const BlochField& field, int cell) const;

  /// Variational flux: lambda with int lambda psi_b dx1 equal to the weak residual
  /// at each surface node of the physical cell. The conormal derivative is
  /// d_nu u = -lambda / sqrt(1 + zeta'^2) for the upward unit normal nu.
  SurfaceTrace surface_flux(const BlochField& field, const CouplingBlock* coupling, int cell) const;

 private:
  std::shared_ptr<const FemSpace> space_;
  QuasiMomentumGrid grid_;
  DtnConfig dtn_;
  SolverTolerances tol_;
  std::vector<std::unique_ptr<AlphaSystem>> systems_;
};

}  // namespace perisurf
