#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bloch_solver.hpp"
#include "measurement.hpp"
#include "perturbation.hpp"
#include "spline.hpp"
#include "surface.hpp"

namespace perisurf {

struct ForwardSetup {
  PeriodicSurface surface = PeriodicSurface::flat(2.0 * kPi, 0.0);
  HerglotzDensity incident = HerglotzDensity::standard();
  double k = 3.0;
  double H = 4.0;
  double mesh_h = 0.1;
  int M = 16;
  double height = 4.0;          // data line
  std::vector<double> x1;       // data abscissas
  int cell = 0;                 // perturbed cell J
  int spline_count = 10;
  /// Optional linear map applied to every trace on the data line (far-to-near
  /// reduction); empty means identity.
  Eigen::MatrixXcd data_map;
  SolverTolerances tolerances{1e-12, 300, 60};
};

/// Scattering operator C -> P(C) on the data abscissas, with the unperturbed
/// solve cached. Read-only after construction.
class ScatteringContext {
 public:
  explicit ScatteringContext(ForwardSetup setup);

  const ForwardSetup& setup() const { return setup_; }
  const BlochSolver& solver() const { return *solver_; }
  const SplineBasis& basis() const { return basis_; }
  std::uint64_t tag() const { return tag_; }
  /// Trapezoid weights of the data abscissas; the data inner product is Re sum w a conj(b).
  const std::vector<double>& weights() const { return weights_; }

  Perturbation perturbation(const Eigen::VectorXd& C) const;
  /// Scattered data of the unperturbed surface.
  const Eigen::VectorXcd& unperturbed_data() const { return U0_; }
  const BlochField& unperturbed_field() const { return w0_; }

  /// Data-line trace of a Bloch family; the incident modes are removed when given.
  Eigen::VectorXcd measure(const BlochField& field, const HerglotzDensity* incident) const;
  Eigen::VectorXcd forward(const Eigen::VectorXd& C, SolveStats* stats = nullptr) const;

  double norm(const Eigen::VectorXcd& v) const;
  double inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) const;

 private:
  ForwardSetup setup_;
  SplineBasis basis_;
  std::shared_ptr<FemSpace> space_;
  std::unique_ptr<BlochSolver> solver_;
  std::vector<double> weights_;
  BlochField w0_;
  Eigen::VectorXcd U0_;
  std::uint64_t tag_ = 0;
};

/// Perturbed solve at C with the surface flux of the total field.
struct LinearizationPoint {
  Eigen::VectorXd coefficients;
  std::uint64_t tag = 0;  // hash of the context tag and the coefficients
  CouplingBlock coupling;
  BlochField field{QuasiMomentumGrid(2, 1.0), {}};
  SurfaceTrace flux;                // lambda at the surface nodes of cell J (cell-local x1)
  std::vector<double> slope_factor; // 1 + zeta_p'^2 at the same nodes
  Eigen::VectorXcd data;            // P(C)
  SolveStats stats;
};

std::uint64_t linearization_tag(std::uint64_t context_tag, const Eigen::VectorXd& C);

LinearizationPoint linearize(const ScatteringContext& ctx, const Eigen::VectorXd& C);

/// DS h on the data abscissas for h = sum_n direction_n phi_n.
Eigen::VectorXcd shape_derivative(const ScatteringContext& ctx, const LinearizationPoint& point,
                                  const Eigen::VectorXd& direction);

/// All N columns DP e_n.
Eigen::MatrixXcd derivative_matrix(const ScatteringContext& ctx, const LinearizationPoint& point);

struct AdjointState {
  BlochField z{QuasiMomentumGrid(2, 1.0), {}};
  SurfaceTrace flux;
};

/// Top-boundary load functional of the data pairing, per alpha node; the
/// mirrored conjugate Bloch transform of phi.
Eigen::MatrixXcd adjoint_loads(const ScatteringContext& ctx, const Eigen::VectorXcd& phi);

AdjointState adjoint_state(const ScatteringContext& ctx, const LinearizationPoint& point,
                           const Eigen::VectorXcd& phi);

/// DP* phi in R^N from the adjoint state.
Eigen::VectorXd adjoint_gradient(const ScatteringContext& ctx, const LinearizationPoint& point,
                                 const Eigen::VectorXcd& phi);

struct CgneResult {
  Eigen::VectorXd step;
  int iterations = 0;
  double reduction = 0.0;  // final / initial normal residual
};

struct CgneOptions {
  double tolerance = 1e-2;
  int max_iterations = 20;
};

/// CG on DP* DP H = DP* rhs (real unknowns, weighted complex data space).
CgneResult cgne_solve(const std::function<Eigen::VectorXcd(const Eigen::VectorXd&)>& apply,
                      const std::function<Eigen::VectorXd(const Eigen::VectorXcd&)>& adjoint,
                      const Eigen::VectorXcd& rhs, const std::function<double(const Eigen::VectorXcd&)>& norm2,
                      CgneOptions options = {});

struct NewtonOptions {
  double epsilon = 0.05;
  int max_outer = 15;
  CgneOptions inner;
  int max_halvings = 10;
  /// An accepted step lowering the residual by less than this fraction ends the run (stagnation).
  double min_relative_decrease = 1e-3;
  bool use_adjoint_state = false;  // DP* through adjoint solves instead of the materialized DP
  Eigen::VectorXd initial;         // start coefficients (empty: zero), e.g. a saved iterate
};

enum class StopReason { Discrepancy, MaxIterations, Stagnation };
std::string stop_reason_name(StopReason r);

struct ReconstructionState {
  Eigen::VectorXd coefficients;
  std::vector<double> residuals;   // ||P(C_i) - U|| per accepted iterate
  std::vector<double> step_norms;
  std::vector<int> inner_iterations;
  std::vector<Eigen::VectorXd> iterates;
  StopReason stop = StopReason::MaxIterations;
  double data_norm = 0.0;
};

ReconstructionState newton_reconstruct(const ScatteringContext& ctx, const Eigen::VectorXcd& U,
                                       const NewtonOptions& options = {},
                                       const std::function<void(const ReconstructionState&)>& on_iterate = {});

/// Relative L2 error of p against a reference perturbation by Gauss quadrature over the cell.
double perturbation_error(const Perturbation& p, const Perturbation& truth);

}  // namespace perisurf
