#include "perisurf/hankel.hpp"

#include <cmath>

#include "perisurf/errors.hpp"

namespace perisurf {

cplx hankel0(double r) {
  if (!(r > 0.0)) fail(ErrorKind::Domain, "Hankel function evaluated at r <= 0");
  return {std::cyl_bessel_j(0.0, r), std::cyl_neumann(0.0, r)};
}

cplx hankel1(double r) {
  if (!(r > 0.0)) fail(ErrorKind::Domain, "Hankel function evaluated at r <= 0");
  return {std::cyl_bessel_j(1.0, r), std::cyl_neumann(1.0, r)};
}

cplx hankel_phi(const Eigen::Vector2d& x, const Eigen::Vector2d& y, double k) {
  const double r = (x - y).norm();
  if (r == 0.0) fail(ErrorKind::Domain, "fundamental solution is singular at x = y");
  return cplx(0.0, 0.25) * hankel0(k * r);
}

}  // namespace perisurf
