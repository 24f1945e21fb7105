#pragma once

#include <Eigen/Dense>
#include <complex>

namespace perisurf {

using cplx = std::complex<double>;

/// H_0^(1)(r) = J_0(r) + i Y_0(r), r > 0.
cplx hankel0(double r);
/// H_1^(1)(r).
cplx hankel1(double r);

/// Free-space fundamental solution (i/4) H_0^(1)(k |x - y|); throws at x = y.
cplx hankel_phi(const Eigen::Vector2d& x, const Eigen::Vector2d& y, double k);

}  // namespace perisurf
