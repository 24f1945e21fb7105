#include "perisurf/gmres.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace perisurf {

using cplx = std::complex<double>;

GmresResult gmres(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
                  const Eigen::VectorXcd& b, double tol, int max_iterations, int restart) {
  GmresResult out;
  out.x = Eigen::VectorXcd::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  Eigen::VectorXcd r = b;
  double rnorm = bnorm;
  while (out.iterations < max_iterations) {
    const int m = std::min(restart, max_iterations - out.iterations);
    std::vector<Eigen::VectorXcd> V{r / rnorm};
    Eigen::MatrixXcd Hm = Eigen::MatrixXcd::Zero(m + 1, m);
    std::vector<cplx> cs(m), sn(m);
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(m + 1);
    g(0) = rnorm;
    int used = 0;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXcd w = apply(V[j]);
      for (int i = 0; i <= j; ++i) {
        Hm(i, j) = V[i].dot(w);
        w -= Hm(i, j) * V[i];
      }
      Hm(j + 1, j) = w.norm();
      for (int i = 0; i < j; ++i) {
        const cplx t = cs[i] * Hm(i, j) + sn[i] * Hm(i + 1, j);
        Hm(i + 1, j) = -std::conj(sn[i]) * Hm(i, j) + std::conj(cs[i]) * Hm(i + 1, j);
        Hm(i, j) = t;
      }
      const double den = std::hypot(std::abs(Hm(j, j)), std::abs(Hm(j + 1, j)));
      if (den == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        cs[j] = Hm(j, j) / den;
        sn[j] = Hm(j + 1, j) / den;
        cs[j] = std::conj(cs[j]);
        sn[j] = std::conj(sn[j]);
      }
      const cplx hjj = cs[j] * Hm(j, j) + sn[j] * Hm(j + 1, j);
      Hm(j, j) = hjj;
      Hm(j + 1, j) = 0.0;
      g(j + 1) = -std::conj(sn[j]) * g(j);
      g(j) = cs[j] * g(j);
      ++used;
      ++out.iterations;
      const double est = std::abs(g(j + 1)) / bnorm;
      const double hnext = w.norm();
      if (est <= tol || hnext < 1e-300) break;
      V.push_back(w / hnext);
    }
    Eigen::VectorXcd y = Hm.topLeftCorner(used, used).triangularView<Eigen::Upper>().solve(g.head(used));
    for (int i = 0; i < used; ++i) out.x += y(i) * V[i];
    r = b - apply(out.x);
    rnorm = r.norm();
    out.relative_residual = rnorm / bnorm;
    if (out.relative_residual <= tol) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

}  // namespace perisurf
