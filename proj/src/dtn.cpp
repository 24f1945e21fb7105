#include "perisurf/dtn.hpp"

#include <cmath>
#include <sstream>

#include "perisurf/errors.hpp"
#include "perisurf/surface.hpp"

namespace perisurf {

cplx branch_beta(double k, double xi) {
  const double d = k * k - xi * xi;
  return d >= 0.0 ? cplx(std::sqrt(d), 0.0) : cplx(0.0, std::sqrt(-d));
}

DtnConfig DtnConfig::standard(double k, double period) {
  DtnConfig c;
  c.k = k;
  c.period = period;
  c.truncation = static_cast<int>(std::ceil(k / (2.0 * kPi / period))) + 8;
  return c;
}

double DtnConfig::reciprocal_period() const { return 2.0 * kPi / period; }

bool DtnConfig::propagating(int j, double alpha) const { return std::abs(xi(j, alpha)) <= k; }

void DtnConfig::check_anomaly(double alpha) const {
  for (int j = -truncation; j <= truncation; ++j)
    if (std::abs(beta(j, alpha)) < 1e-8) {
      std::ostringstream os;
      os << "Wood anomaly: beta_" << j << " vanishes at alpha = " << alpha;
      fail(ErrorKind::Anomaly, os.str());
    }
}

std::vector<double> periodic_trapezoid_weights(const std::vector<double>& x, double period) {
  const std::size_t n = x.size();
  std::vector<double> w(n);
  for (std::size_t a = 0; a < n; ++a) {
    const double next = (a + 1 < n) ? x[a + 1] : x[0] + period;
    const double prev = (a > 0) ? x[a - 1] : x[n - 1] - period;
    w[a] = 0.5 * (next - prev);
  }
  return w;
}

RayleighCoefficients rayleigh_coefficients(const Eigen::VectorXcd& trace, const std::vector<double>& x,
                                           double alpha, const DtnConfig& dtn, double height) {
  if (trace.size() != static_cast<Eigen::Index>(x.size()))
    fail(ErrorKind::Interface, "trace and abscissa counts differ");
  RayleighCoefficients r;
  r.alpha = alpha;
  r.height = height;
  r.truncation = dtn.truncation;
  r.values = Eigen::VectorXcd::Zero(dtn.modes());
  const auto w = periodic_trapezoid_weights(x, dtn.period);
  for (int j = -dtn.truncation; j <= dtn.truncation; ++j) {
    const double xi = dtn.xi(j, alpha);
    cplx s = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) s += w[a] * trace(a) * std::exp(cplx(0.0, -xi * x[a]));
    r(j) = s / dtn.period;
  }
  return r;
}

Eigen::VectorXcd propagate_field(const RayleighCoefficients& coeffs, const DtnConfig& dtn, double x2,
                                 const std::vector<double>& x1) {
  if (x2 < coeffs.height) fail(ErrorKind::Domain, "Rayleigh expansion evaluated below the artificial boundary");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(x1.size()));
  for (int j = -coeffs.truncation; j <= coeffs.truncation; ++j) {
    const cplx c = coeffs(j);
    if (c == 0.0) continue;
    const double xi = dtn.xi(j, coeffs.alpha);
    const cplx lift = c * std::exp(cplx(0.0, 1.0) * dtn.beta(j, coeffs.alpha) * (x2 - coeffs.height));
    for (std::size_t q = 0; q < x1.size(); ++q) out(q) += lift * std::exp(cplx(0.0, xi * x1[q]));
  }
  return out;
}

Eigen::VectorXcd apply_nodal_dtn(const Eigen::VectorXcd& trace, const std::vector<double>& x, double alpha,
                                 const DtnConfig& dtn, double height) {
  auto r = rayleigh_coefficients(trace, x, alpha, dtn, height);
  for (int j = -r.truncation; j <= r.truncation; ++j) r(j) *= cplx(0.0, 1.0) * dtn.beta(j, alpha);
  return propagate_field(r, dtn, height, x);
}

}  // namespace perisurf
