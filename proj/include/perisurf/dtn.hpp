#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace perisurf {

using cplx = std::complex<double>;

/// beta = sqrt(k^2 - xi^2), real nonnegative for |xi| <= k, i sqrt(xi^2 - k^2) otherwise.
cplx branch_beta(double k, double xi);

struct DtnConfig {
  double k = 0.0;
  double period = 0.0;
  int truncation = 0;  // modes |j| <= truncation

  /// truncation = ceil(k / L*) + 8.
  static DtnConfig standard(double k, double period);

  double reciprocal_period() const;
  int modes() const { return 2 * truncation + 1; }
  double xi(int j, double alpha) const { return reciprocal_period() * j - alpha; }
  cplx beta(int j, double alpha) const { return branch_beta(k, xi(j, alpha)); }
  bool propagating(int j, double alpha) const;
  /// Throws an anomaly error when some retained |beta_j| < 1e-8.
  void check_anomaly(double alpha) const;
};

/// Column j + truncation holds the coefficient of exp(i (L* j - alpha) x1) at x2 = height.
struct RayleighCoefficients {
  double alpha = 0.0;
  double height = 0.0;
  int truncation = 0;
  Eigen::VectorXcd values;

  cplx operator()(int j) const { return values(j + truncation); }
  cplx& operator()(int j) { return values(j + truncation); }
};

/// Periodic trapezoid weights for sorted abscissas x covering one period from x[0].
std::vector<double> periodic_trapezoid_weights(const std::vector<double>& x, double period);

/// Fourier analysis of an alpha-quasi-periodic trace sampled at one period of
/// top-boundary nodes (sorted, right corner excluded).
RayleighCoefficients rayleigh_coefficients(const Eigen::VectorXcd& trace, const std::vector<double>& x,
                                           double alpha, const DtnConfig& dtn, double height);

/// Rayleigh synthesis sum_j w_j exp(i xi_j x1 + i beta_j (x2 - H)); x2 >= H.
Eigen::VectorXcd propagate_field(const RayleighCoefficients& coeffs, const DtnConfig& dtn, double x2,
                                 const std::vector<double>& x1);

/// T_alpha applied to a nodal trace: analysis, multiply by i beta_j, synthesis at the same nodes.
Eigen::VectorXcd apply_nodal_dtn(const Eigen::VectorXcd& trace, const std::vector<double>& x, double alpha,
                                 const DtnConfig& dtn, double height);

}  // namespace perisurf
