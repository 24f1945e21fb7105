#pragma once

#include <numbers>
#include <string>
#include <vector>

namespace perisurf {

inline constexpr double kPi = std::numbers::pi;

/// Lambda-periodic graph surface x2 = zeta(x1) stored as a trigonometric table
///   zeta(x) = mean + sum_n cos_n cos(n L* x) + sin_n sin(n L* x),  L* = 2 pi / period.
/// The named presets f1, f2, f3 are entries of this family.
class PeriodicSurface {
 public:
  PeriodicSurface(double period, double mean, std::vector<double> cos_coeffs,
                  std::vector<double> sin_coeffs, std::string name = "table");

  static PeriodicSurface flat(double period, double height);
  /// "f1": 2 + cos(x)/4, "f2": 2 - cos(x)/4, "f3": 1 + sin(x)/3 - cos(2x)/4 (period 2 pi).
  static PeriodicSurface preset(const std::string& name);

  double operator()(double x1) const;
  double derivative(double x1) const;
  double second_derivative(double x1) const;

  double period() const { return period_; }
  double reciprocal_period() const { return 2.0 * kPi / period_; }
  double sup_height() const { return sup_; }
  double inf_height() const { return inf_; }
  const std::string& name() const { return name_; }
  double mean() const { return mean_; }
  const std::vector<double>& cos_coeffs() const { return cos_; }
  const std::vector<double>& sin_coeffs() const { return sin_; }

 private:
  double period_;
  double mean_;
  std::vector<double> cos_;
  std::vector<double> sin_;
  std::string name_;
  double sup_ = 0.0;
  double inf_ = 0.0;
};

}  // namespace perisurf
