#include "perisurf/herglotz.hpp"

#include <cmath>
#include <vector>

#include "perisurf/errors.hpp"
#include "perisurf/spline.hpp"
#include "perisurf/surface.hpp"

namespace perisurf {

HerglotzDensity HerglotzDensity::standard() {
  return {[](double t) {
            const double a = (t - 1.0) * (t + 1.0);
            const double a3 = a * a * a;
            return a3 * a3;
          },
          -1.0, 1.0};
}

HerglotzDensity HerglotzDensity::zero() {
  return {[](double) { return 0.0; }, -1.0, 1.0};
}

double IncidentModes::xi(int q) const { return 2.0 * kPi / period * m[q] - alpha; }

double IncidentModes::beta(int q) const {
  const double x = xi(q);
  return std::sqrt(std::max(0.0, k * k - x * x));
}

cplx IncidentModes::value(double x1, double x2) const {
  cplx v = 0.0;
  for (std::size_t q = 0; q < m.size(); ++q)
    v += amp[q] * std::exp(cplx(0.0, xi(q) * x1 - beta(q) * x2));
  return v;
}

cplx IncidentModes::dx2(double x1, double x2) const {
  cplx v = 0.0;
  for (std::size_t q = 0; q < m.size(); ++q)
    v += amp[q] * cplx(0.0, -beta(q)) * std::exp(cplx(0.0, xi(q) * x1 - beta(q) * x2));
  return v;
}

IncidentModes bloch_of_herglotz(const HerglotzDensity& density, double k, double period, double alpha) {
  IncidentModes out;
  out.alpha = alpha;
  out.period = period;
  out.k = k;
  const double ls = 2.0 * kPi / period;
  const int mmax = static_cast<int>(std::ceil((k + std::abs(alpha)) / ls)) + 1;
  const double scale = std::sqrt(2.0 * kPi / period);
  for (int m = -mmax; m <= mmax; ++m) {
    const double xi = ls * m - alpha;
    if (std::abs(xi) >= k) continue;
    const double t = std::asin(xi / k);
    if (t <= density.lo || t >= density.hi) continue;
    const double g = density(t);
    if (g == 0.0) continue;
    const double c = std::cos(t);
    if (c <= 1e-8) fail(ErrorKind::Anomaly, "Herglotz mode at grazing incidence (cos t <= 1e-8)");
    out.m.push_back(m);
    out.amp.push_back(scale * g / (k * c));
  }
  return out;
}

IncidentModes plane_wave_modes(double k, double period, double angle, double& alpha) {
  const double ls = 2.0 * kPi / period;
  const double xi = k * std::sin(angle);
  const int m = static_cast<int>(std::lround(xi / ls));
  alpha = ls * m - xi;
  IncidentModes out;
  out.alpha = alpha;
  out.period = period;
  out.k = k;
  out.m = {m};
  out.amp = {1.0};
  return out;
}

namespace {

cplx gl_panel(const std::function<cplx(double)>& f, double a, double b, const std::vector<double>& x,
              const std::vector<double>& w) {
  cplx s = 0.0;
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(c + h * x[i]);
  return h * s;
}

cplx adaptive(const std::function<cplx(double)>& f, double a, double b, cplx whole, double tol, int depth,
              const std::vector<double>& x, const std::vector<double>& w) {
  const double m = 0.5 * (a + b);
  const cplx left = gl_panel(f, a, m, x, w), right = gl_panel(f, m, b, x, w);
  if (depth > 40 || std::abs(left + right - whole) <= tol) return left + right;
  return adaptive(f, a, m, left, 0.5 * tol, depth + 1, x, w) + adaptive(f, m, b, right, 0.5 * tol, depth + 1, x, w);
}

}  // namespace

cplx herglotz_direct(const HerglotzDensity& density, double k, double x1, double x2, double tol) {
  std::vector<double> x, w;
  gauss_legendre(16, x, w);
  const auto f = [&](double t) {
    return density(t) * std::exp(cplx(0.0, k * (x1 * std::sin(t) - x2 * std::cos(t))));
  };
  const double a = std::max(density.lo, -0.5 * kPi), b = std::min(density.hi, 0.5 * kPi);
  return adaptive(f, a, b, gl_panel(f, a, b, x, w), tol, 0, x, w);
}

}  // namespace perisurf
