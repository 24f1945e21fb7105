#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace perisurf {

/// Uniform cubic B-splines on a closed interval [a, b], keeping only the N
/// functions whose support avoids both endpoints (N + 3 knot intervals).
/// Every kept function vanishes with its first two derivatives at a and b.
class SplineBasis {
 public:
  SplineBasis(double a, double b, int count);

  int size() const { return count_; }
  double lower() const { return a_; }
  double upper() const { return b_; }
  double knot_spacing() const { return step_; }
  std::vector<double> knots() const;

  double value(int n, double x) const;
  double derivative(int n, double x) const;
  double second_derivative(int n, double x) const;

  /// Support [t_n, t_{n+4}] of basis function n.
  std::pair<double, double> support(int n) const;

  /// L2 Gram matrix, exact up to Gauss quadrature round-off.
  Eigen::MatrixXd gram() const;

 private:
  double a_, b_, step_;
  int count_;
};

struct Projection {
  Eigen::VectorXd coefficients;
  double relative_residual = 0.0;  // ||target - proj|| / ||target|| in L2(a,b)
};

/// L2-best approximation of target in span(basis).
Projection project_onto_basis(const std::function<double(double)>& target, const SplineBasis& basis);

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace perisurf
