#include "perisurf/quasi_momentum.hpp"

#include <cmath>
#include <iostream>

#include "perisurf/errors.hpp"
#include "perisurf/surface.hpp"

namespace perisurf {

QuasiMomentumGrid::QuasiMomentumGrid(int M, double period, double wavenumber) : period_(period) {
  if (M <= 0 || M % 2 != 0) fail(ErrorKind::Config, "quasimomentum count M must be even and positive");
  if (!(period > 0.0)) fail(ErrorKind::Config, "period must be positive");
  alpha_.resize(M);
  for (int j = 1; j <= M; ++j) alpha_[j - 1] = -kPi / period + kPi * (2.0 * j - 1.0) / (M * period);
  if (wavenumber > 0.0) {
    for (int i = 0; i < M; ++i) {
      if (!near_anomaly(alpha_[i], wavenumber, period)) continue;
      alpha_[i] += 1e-6 * reciprocal_period();
      shifted_.push_back(i);
      std::cerr << "perisurf: quasimomentum node " << i << " sits on a Wood anomaly; shifted by 1e-6 L*\n";
    }
  }
}

double QuasiMomentumGrid::reciprocal_period() const { return 2.0 * kPi / period_; }

double QuasiMomentumGrid::weight() const { return reciprocal_period() / size(); }

bool QuasiMomentumGrid::near_anomaly(double alpha, double k, double period, double tol) {
  const double ls = 2.0 * kPi / period;
  const int mmax = static_cast<int>(std::ceil((k + std::abs(alpha)) / ls)) + 1;
  for (int m = -mmax; m <= mmax; ++m)
    if (std::abs(std::abs(ls * m - alpha) - k) < tol) return true;
  return false;
}

}  // namespace perisurf
