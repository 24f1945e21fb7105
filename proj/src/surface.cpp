#include "perisurf/surface.hpp"

#include <algorithm>
#include <cmath>

#include "perisurf/errors.hpp"

namespace perisurf {

PeriodicSurface::PeriodicSurface(double period, double mean, std::vector<double> cos_coeffs,
                                 std::vector<double> sin_coeffs, std::string name)
    : period_(period), mean_(mean), cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)),
      name_(std::move(name)) {
  if (!(period_ > 0.0)) fail(ErrorKind::Geometry, "surface period must be positive");
  // Dense sampling plus local refinement of the extremes.
  const int n = 4096;
  sup_ = -1e300;
  inf_ = 1e300;
  double xs = 0.0, xi = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -0.5 * period_ + period_ * i / n;
    const double z = (*this)(x);
    if (z > sup_) sup_ = z, xs = x;
    if (z < inf_) inf_ = z, xi = x;
  }
  auto refine = [&](double x0, bool maximize) {
    double x = x0;
    for (int it = 0; it < 30; ++it) {
      const double d2 = second_derivative(x);
      if (std::abs(d2) < 1e-14) break;
      const double step = derivative(x) / d2;
      if (std::abs(step) > period_ / n) break;
      x -= step;
    }
    const double z = (*this)(x);
    if (maximize) sup_ = std::max(sup_, z);
    else inf_ = std::min(inf_, z);
  };
  refine(xs, true);
  refine(xi, false);
}

PeriodicSurface PeriodicSurface::flat(double period, double height) {
  return PeriodicSurface(period, height, {}, {}, "flat");
}

PeriodicSurface PeriodicSurface::preset(const std::string& name) {
  const double period = 2.0 * kPi;
  if (name == "f1") return PeriodicSurface(period, 2.0, {0.25}, {0.0}, name);
  if (name == "f2") return PeriodicSurface(period, 2.0, {-0.25}, {0.0}, name);
  if (name == "f3") return PeriodicSurface(period, 1.0, {0.0, -0.25}, {1.0 / 3.0, 0.0}, name);
  fail(ErrorKind::Config, "unknown surface preset '" + name + "'");
}

double PeriodicSurface::operator()(double x1) const {
  const double w = reciprocal_period();
  double z = mean_;
  for (std::size_t n = 0; n < cos_.size(); ++n) z += cos_[n] * std::cos((n + 1) * w * x1);
  for (std::size_t n = 0; n < sin_.size(); ++n) z += sin_[n] * std::sin((n + 1) * w * x1);
  return z;
}

double PeriodicSurface::derivative(double x1) const {
  const double w = reciprocal_period();
  double d = 0.0;
  for (std::size_t n = 0; n < cos_.size(); ++n) d -= cos_[n] * (n + 1) * w * std::sin((n + 1) * w * x1);
  for (std::size_t n = 0; n < sin_.size(); ++n) d += sin_[n] * (n + 1) * w * std::cos((n + 1) * w * x1);
  return d;
}

double PeriodicSurface::second_derivative(double x1) const {
  const double w = reciprocal_period();
  double d = 0.0;
  for (std::size_t n = 0; n < cos_.size(); ++n) {
    const double f = (n + 1) * w;
    d -= cos_[n] * f * f * std::cos(f * x1);
  }
  for (std::size_t n = 0; n < sin_.size(); ++n) {
    const double f = (n + 1) * w;
    d -= sin_[n] * f * f * std::sin(f * x1);
  }
  return d;
}

}  // namespace perisurf
