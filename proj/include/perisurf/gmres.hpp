#pragma once

#include <Eigen/Dense>
#include <functional>

namespace perisurf {

struct GmresResult {
  Eigen::VectorXcd x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Restarted GMRES (modified Gram-Schmidt, Givens rotations) for A x = b,
/// started from x = 0. Stops when ||b - A x|| <= tol ||b||.
GmresResult gmres(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
                  const Eigen::VectorXcd& b, double tol, int max_iterations, int restart = 60);

}  // namespace perisurf
