#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace perisurf {

using cplx = std::complex<double>;

/// Angular density of a downward Herglotz wave
///   u_i(x) = int g(t) exp(i k (x1 sin t - x2 cos t)) dt,  t in (-pi/2, pi/2),
/// with t measured from the downward vertical. g vanishes outside (lo, hi).
struct HerglotzDensity {
  std::function<double(double)> g;
  double lo = -1.0;
  double hi = 1.0;

  double operator()(double t) const { return (t <= lo || t >= hi) ? 0.0 : g(t); }

  /// g(t) = (t-1)^6 (t+1)^6 on (-1, 1).
  static HerglotzDensity standard();
  static HerglotzDensity zero();
};

/// Downward alpha-quasi-periodic mode expansion
///   w(x) = sum_q amp_q exp(i (L* m_q - alpha) x1 - i beta_q x2).
struct IncidentModes {
  double alpha = 0.0;
  double period = 0.0;
  double k = 0.0;
  std::vector<int> m;
  std::vector<cplx> amp;

  double xi(int q) const;
  double beta(int q) const;
  cplx value(double x1, double x2) const;
  cplx dx2(double x1, double x2) const;
  bool empty() const { return m.empty(); }
};

/// Closed-form Bloch transform of the Herglotz wave at quasimomentum alpha:
///   amp_m = sqrt(2pi/L) g(t_m) / (k cos t_m),  sin t_m = (L* m - alpha)/k.
/// Throws an anomaly error if a contributing mode has cos t_m <= 1e-8.
IncidentModes bloch_of_herglotz(const HerglotzDensity& density, double k, double period, double alpha);

/// Single plane wave exp(i k (x1 sin t - x2 cos t)), folded into its quasimomentum.
IncidentModes plane_wave_modes(double k, double period, double angle, double& alpha);

/// Direct adaptive Gauss-Legendre evaluation of the Herglotz integral.
cplx herglotz_direct(const HerglotzDensity& density, double k, double x1, double x2, double tol = 1e-10);

}  // namespace perisurf
