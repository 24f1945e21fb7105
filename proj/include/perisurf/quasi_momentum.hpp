#pragma once

#include <vector>

namespace perisurf {

/// Midpoint grid alpha_j = -pi/L + pi(2j-1)/(M L), j = 1..M, on the Brillouin
/// interval (-pi/L, pi/L]. Each node carries the quadrature weight L*/M.
class QuasiMomentumGrid {
 public:
  /// A positive wavenumber enables the Wood-anomaly audit: nodes with
  /// |L* m - alpha| within 1e-8 of k are moved by 1e-6 L*.
  QuasiMomentumGrid(int M, double period, double wavenumber = 0.0);

  int size() const { return static_cast<int>(alpha_.size()); }
  double period() const { return period_; }
  double reciprocal_period() const;
  double alpha(int i) const { return alpha_[i]; }
  const std::vector<double>& nodes() const { return alpha_; }
  double weight() const;
  /// Index of the node at -alpha(i).
  int mirror(int i) const { return size() - 1 - i; }
  const std::vector<int>& shifted_nodes() const { return shifted_; }

  /// True when some |L* m - alpha| equals k to within tol.
  static bool near_anomaly(double alpha, double k, double period, double tol = 1e-8);

 private:
  double period_;
  std::vector<double> alpha_;
  std::vector<int> shifted_;
};

}  // namespace perisurf
