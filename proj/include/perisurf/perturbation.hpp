#pragma once

#include <Eigen/Dense>
#include "json.hpp"
#include <optional>
#include <string>

#include "spline.hpp"

namespace perisurf {

/// Local perturbation p of a periodic surface, supported in the cell
/// W + J*period with W = (-period/2, period/2]. Either one of the closed-form
/// presets or a spline expansion sum_n c_n phi_n over the cell.
class Perturbation {
 public:
  enum class Kind { Zero, Preset, Spline };

  static Perturbation zero(double period, int cell_index = 0);
  /// "p1", "p2", "p3"; literal_p3 selects the (x-3)^6 reading of p3.
  static Perturbation preset(const std::string& name, double period, int cell_index = 0,
                             bool literal_p3 = false);
  static Perturbation spline(const SplineBasis& basis, Eigen::VectorXd coefficients,
                             int cell_index, double period);
  /// Spline basis with `count` functions on the closed cell of index J.
  static SplineBasis cell_basis(double period, int count);

  /// p at a physical abscissa; exactly zero outside the perturbed cell.
  double operator()(double x1) const;
  double derivative(double x1) const;

  /// p in local cell coordinates s = x1 - J*period, s in [-period/2, period/2].
  double local_value(double s) const;
  double local_derivative(double s) const;
  double local_second_derivative(double s) const;

  int cell_index() const { return cell_; }
  double period() const { return period_; }
  Kind kind() const { return kind_; }
  const std::string& preset_name() const { return name_; }
  const std::optional<SplineBasis>& basis() const { return basis_; }
  const Eigen::VectorXd& coefficients() const { return coeffs_; }
  bool is_zero() const;

  Perturbation shifted_to(int cell_index) const;
  Perturbation with_coefficients(Eigen::VectorXd coeffs) const;

  nlohmann::json to_json() const;
  static Perturbation from_json(const nlohmann::json& j, double period);

 private:
  Kind kind_ = Kind::Zero;
  std::string name_;
  bool literal_p3_ = false;
  std::optional<SplineBasis> basis_;
  Eigen::VectorXd coeffs_;
  int cell_ = 0;
  double period_ = 0.0;
};

}  // namespace perisurf
