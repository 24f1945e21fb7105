#include "perisurf/diffeo.hpp"

#include <algorithm>
#include <cmath>

#include "perisurf/errors.hpp"

namespace perisurf {

DiffeoField::DiffeoField(const PeriodicSurface& surface, const Perturbation& perturbation, double H)
    : surface_(surface), p_(perturbation), H_(H) {
  const double period = surface_.period();
  double sup_p = surface_.sup_height();
  const int n = 2048;
  for (int i = 0; i <= n; ++i) {
    const double x = (p_.cell_index() - 0.5) * period + period * i / n;
    sup_p = std::max(sup_p, surface_(x) + p_(x));
  }
  if (!(H_ > sup_p))
    fail(ErrorKind::Geometry, "artificial boundary height must exceed both surfaces");
  if (!(min_determinant() > 0.0))
    fail(ErrorKind::InvalidPerturbation, "perturbation folds the domain (det <= 0)");
}

Eigen::Vector2d DiffeoField::map(const Eigen::Vector2d& x) const {
  const double p = p_(x(0));
  if (p == 0.0) return x;
  const double r = (x(1) - H_) / (surface_(x(0)) - H_);
  return {x(0), x(1) + r * r * r * p};
}

Eigen::Matrix2d DiffeoField::jacobian(const Eigen::Vector2d& x) const {
  Eigen::Matrix2d d = Eigen::Matrix2d::Identity();
  const double p = p_(x(0));
  const double dp = p_.derivative(x(0));
  if (p == 0.0 && dp == 0.0) return d;
  const double z = surface_(x(0)) - H_;
  const double dz = surface_.derivative(x(0));
  const double t = x(1) - H_;
  const double t3 = t * t * t, z3 = z * z * z;
  d(1, 0) = t3 * (dp / z3 - 3.0 * p * dz / (z3 * z));
  d(1, 1) = 1.0 + 3.0 * t * t * p / z3;
  return d;
}

double DiffeoField::determinant(const Eigen::Vector2d& x) const { return jacobian(x)(1, 1); }

MaterialSample DiffeoField::material(const Eigen::Vector2d& x) const {
  const Eigen::Matrix2d d = jacobian(x);
  const double det = d(1, 1);
  const double q1 = d(1, 0);
  MaterialSample m;
  m.c = std::abs(det);
  m.A << m.c / det * det, -m.c / det * q1, -m.c / det * q1, m.c / det * (1.0 + q1 * q1) / det;
  return m;
}

double DiffeoField::min_determinant() const {
  // det = 1 + 3 ((x2-H)/(zeta-H))^2 p/(zeta-H) is monotone in x2 on [zeta, H]; the
  // extreme values sit at x2 = zeta (1 - 3p/(H-zeta)) and at x2 = H (1).
  const double period = surface_.period();
  double m = 1.0;
  const int n = 4096;
  for (int i = 0; i <= n; ++i) {
    const double x = (p_.cell_index() - 0.5) * period + period * i / n;
    m = std::min(m, 1.0 - 3.0 * p_(x) / (H_ - surface_(x)));
  }
  return m;
}

MaterialSample material_coefficients(const DiffeoField& diffeo, const Eigen::Vector2d& x) {
  return diffeo.material(x);
}

}  // namespace perisurf
