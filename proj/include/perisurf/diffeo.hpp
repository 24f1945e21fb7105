#pragma once

#include <Eigen/Dense>

#include "perturbation.hpp"
#include "surface.hpp"

namespace perisurf {

struct MaterialSample {
  Eigen::Matrix2d A;  // |det D| D^{-1} D^{-T}
  double c = 1.0;     // |det D|
};

/// Cell-supported map Phi_p(x) = (x1, x2 + ((x2-H)^3/(zeta-H)^3) p(x1)) carrying
/// the reference surface onto the perturbed one, with its analytic Jacobian.
class DiffeoField {
 public:
  /// Minimum admissible Jacobian determinant on the sampled strip.
  static constexpr double kMinDeterminant = 0.1;

  DiffeoField(const PeriodicSurface& surface, const Perturbation& perturbation, double H);

  Eigen::Vector2d map(const Eigen::Vector2d& x) const;
  Eigen::Matrix2d jacobian(const Eigen::Vector2d& x) const;
  double determinant(const Eigen::Vector2d& x) const;
  MaterialSample material(const Eigen::Vector2d& x) const;

  /// Smallest det over the strip zeta <= x2 <= H (closed form in x2, sampled in x1).
  double min_determinant() const;

  double height() const { return H_; }
  const PeriodicSurface& surface() const { return surface_; }
  const Perturbation& perturbation() const { return p_; }

 private:
  PeriodicSurface surface_;
  Perturbation p_;
  double H_;
};

/// Coefficients (A_p, c_p) at x; identity outside the perturbed cell.
MaterialSample material_coefficients(const DiffeoField& diffeo, const Eigen::Vector2d& x);

}  // namespace perisurf
