#include "perisurf/spline.hpp"

#include <cmath>

#include "perisurf/errors.hpp"
#include "perisurf/surface.hpp"

namespace perisurf {

namespace {

double bspline(double u) {
  if (u <= 0.0 || u >= 4.0) return 0.0;
  if (u < 1.0) return u * u * u / 6.0;
  if (u < 2.0) return (-3.0 * u * u * u + 12.0 * u * u - 12.0 * u + 4.0) / 6.0;
  if (u < 3.0) return (3.0 * u * u * u - 24.0 * u * u + 60.0 * u - 44.0) / 6.0;
  const double v = 4.0 - u;
  return v * v * v / 6.0;
}

double bspline_d1(double u) {
  if (u <= 0.0 || u >= 4.0) return 0.0;
  if (u < 1.0) return 0.5 * u * u;
  if (u < 2.0) return (-9.0 * u * u + 24.0 * u - 12.0) / 6.0;
  if (u < 3.0) return (9.0 * u * u - 48.0 * u + 60.0) / 6.0;
  const double v = 4.0 - u;
  return -0.5 * v * v;
}

double bspline_d2(double u) {
  if (u <= 0.0 || u >= 4.0) return 0.0;
  if (u < 1.0) return u;
  if (u < 2.0) return -3.0 * u + 4.0;
  if (u < 3.0) return 3.0 * u - 8.0;
  return 4.0 - u;
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p1 = x, p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

SplineBasis::SplineBasis(double a, double b, int count) : a_(a), b_(b), count_(count) {
  if (count < 1) fail(ErrorKind::Config, "spline basis needs at least one function");
  if (!(b > a)) fail(ErrorKind::Config, "spline interval must be nonempty");
  step_ = (b - a) / (count + 3);
}

std::vector<double> SplineBasis::knots() const {
  std::vector<double> t(count_ + 4);
  for (int i = 0; i <= count_ + 3; ++i) t[i] = a_ + i * step_;
  return t;
}

std::pair<double, double> SplineBasis::support(int n) const {
  return {a_ + n * step_, a_ + (n + 4) * step_};
}

double SplineBasis::value(int n, double x) const { return bspline((x - a_) / step_ - n); }
double SplineBasis::derivative(int n, double x) const { return bspline_d1((x - a_) / step_ - n) / step_; }
double SplineBasis::second_derivative(int n, double x) const {
  return bspline_d2((x - a_) / step_ - n) / (step_ * step_);
}

Eigen::MatrixXd SplineBasis::gram() const {
  std::vector<double> gx, gw;
  gauss_legendre(6, gx, gw);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(count_, count_);
  for (int cell = 0; cell < count_ + 3; ++cell) {
    const double lo = a_ + cell * step_;
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double x = lo + 0.5 * step_ * (gx[q] + 1.0);
      const double w = 0.5 * step_ * gw[q];
      for (int i = std::max(0, cell - 3); i <= std::min(count_ - 1, cell); ++i)
        for (int j = std::max(0, cell - 3); j <= std::min(count_ - 1, cell); ++j)
          g(i, j) += w * value(i, x) * value(j, x);
    }
  }
  return g;
}

Projection project_onto_basis(const std::function<double(double)>& target, const SplineBasis& basis) {
  const int n = basis.size();
  const Eigen::MatrixXd g = basis.gram();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  if (!(lmin > 1e-14 * lmax)) fail(ErrorKind::Config, "singular spline Gram matrix");

  std::vector<double> gx, gw;
  gauss_legendre(10, gx, gw);
  // Each knot interval split in 4 to resolve non-polynomial targets.
  const int sub = 4;
  const double h = basis.knot_spacing() / sub;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  double norm2 = 0.0;
  for (int cell = 0; cell < (n + 3) * sub; ++cell) {
    const double lo = basis.lower() + cell * h;
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double x = lo + 0.5 * h * (gx[q] + 1.0);
      const double w = 0.5 * h * gw[q];
      const double f = target(x);
      norm2 += w * f * f;
      for (int i = 0; i < n; ++i) rhs(i) += w * f * basis.value(i, x);
    }
  }
  Projection out;
  out.coefficients = g.ldlt().solve(rhs);
  double res2 = 0.0;
  for (int cell = 0; cell < (n + 3) * sub; ++cell) {
    const double lo = basis.lower() + cell * h;
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double x = lo + 0.5 * h * (gx[q] + 1.0);
      const double w = 0.5 * h * gw[q];
      double p = 0.0;
      for (int i = 0; i < n; ++i) p += out.coefficients(i) * basis.value(i, x);
      const double r = target(x) - p;
      res2 += w * r * r;
    }
  }
  out.relative_residual = norm2 > 0.0 ? std::sqrt(res2 / norm2) : std::sqrt(res2);
  return out;
}

}  // namespace perisurf
