#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "perisurf/alpha_system.hpp"
#include "perisurf/bloch_solver.hpp"
#include "perisurf/errors.hpp"
#include "perisurf/gmres.hpp"

using namespace perisurf;

namespace {

const double L = 2 * kPi;
const double k = 3.0;
// Same surface-to-boundary gap as the f1-f3 presets under H = 4.
const double kFlatH = 2.0;

std::shared_ptr<FemSpace> space_for(const PeriodicSurface& s, double H, double h) {
  return std::make_shared<FemSpace>(build_cell_mesh(s, H, h), k);
}

double rel_l2(const FemSpace& S, const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
  const Eigen::VectorXcd d = u - v;
  const auto Mc = S.mass().cast<cplx>();
  return std::sqrt(std::abs(d.dot(Mc * d)) / std::abs(v.dot(Mc * v)));
}

Eigen::VectorXcd top_trace(const FemSpace& S, const Eigen::VectorXcd& u) {
  Eigen::VectorXcd t(S.top_periodic().size());
  for (std::size_t q = 0; q < S.top_periodic().size(); ++q) t(q) = u(S.top_periodic()[q]);
  return t;
}

// Image solution on the flat surface for an incident angle t0 measured from the x1 axis.
double flat_reflection_error(double h, double t0) {
  const auto S = space_for(PeriodicSurface::flat(L, 0.0), kFlatH, h);
  double alpha = 0.0;
  const auto inc = plane_wave_modes(k, L, kPi / 2 - t0, alpha);
  AlphaSystem sys(S, alpha, DtnConfig::standard(k, L));
  const Eigen::VectorXcd u =
      sys.solve(sys.incident_load(inc), Eigen::VectorXcd::Zero(S->periodic_count()));
  const Eigen::VectorXcd full = S->expand(u, alpha);
  Eigen::VectorXcd exact(full.size());
  for (int v = 0; v < S->mesh().node_count(); ++v) {
    const double x1 = S->mesh().nodes[v].x(), x2 = S->mesh().nodes[v].y();
    exact(v) = std::exp(cplx(0, k * (x1 * std::cos(t0) - x2 * std::sin(t0)))) -
               std::exp(cplx(0, k * (x1 * std::cos(t0) + x2 * std::sin(t0))));
  }
  return rel_l2(*S, full, exact);
}

}  // namespace

TEST_CASE("gmres on a small nonsymmetric system") {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(40, 40) + 0.1 * Eigen::MatrixXcd::Random(40, 40);
  Eigen::VectorXcd b = Eigen::VectorXcd::Random(40);
  const auto r = gmres([&](const Eigen::VectorXcd& x) { return Eigen::VectorXcd(A * x); }, b, 1e-12, 200, 15);
  CHECK(r.converged);
  CHECK((A * r.x - b).norm() <= 1e-11 * b.norm());
}

TEST_CASE("flat surface: method of images and convergence order") {
  const double t0 = 1.0;
  const double e1 = flat_reflection_error(0.1, t0);
  const double e2 = flat_reflection_error(0.05, t0);
  MESSAGE("flat reflection errors " << e1 << " " << e2);
  CHECK(e2 <= 1e-2);
  CHECK(e1 / e2 >= 3.0);
}

TEST_CASE("zero incidence gives zero field; Herglotz energy balance") {
  const auto S = space_for(PeriodicSurface::preset("f1"), 4.0, 0.05);
  const DtnConfig dtn = DtnConfig::standard(k, L);
  const QuasiMomentumGrid grid(16, L, k);
  BlochSolver solver(S, grid, dtn);
  CHECK(solver.solve_unperturbed(HerglotzDensity::zero()).values.norm() == 0.0);

  const auto dens = HerglotzDensity::standard();
  const BlochField w = solver.solve_unperturbed(dens);
  for (int i = 0; i < grid.size(); ++i) {
    const double a = grid.alpha(i);
    const auto inc = bloch_of_herglotz(dens, k, L, a);
    auto r = rayleigh_coefficients(top_trace(*S, w.values.col(i)), S->top_x(), a, dtn, 4.0);
    double in = 0.0;
    for (std::size_t q = 0; q < inc.m.size(); ++q) {
      const double b = inc.beta(static_cast<int>(q));
      r(inc.m[q]) -= inc.amp[q] * std::exp(cplx(0, -b * 4.0));
      in += b * std::norm(inc.amp[q]);
    }
    double out = 0.0;
    for (int j = -dtn.truncation; j <= dtn.truncation; ++j)
      if (dtn.propagating(j, a)) out += dtn.beta(j, a).real() * std::norm(r(j));
    if (in > 0.0) CHECK(std::abs(out - in) <= 5e-2 * in);
  }
  // Quasi-periodic phase after expansion.
  const auto& m = S->mesh();
  for (int i : {0, 7, 15}) {
    const Eigen::VectorXcd full = S->expand(w.values.col(i), grid.alpha(i));
    for (int v = 0; v < m.node_count(); ++v)
      if (m.partner[v] >= 0)
        CHECK(std::abs(full(v) - std::exp(cplx(0, -grid.alpha(i) * L)) * full(m.partner[v])) <= 1e-12);
  }
}

TEST_CASE("self-convergence on f1") {
  const auto dens = HerglotzDensity::standard();
  const DtnConfig dtn = DtnConfig::standard(k, L);
  const double a = 0.1;
  auto coeffs = [&](double h) {
    const auto S = space_for(PeriodicSurface::preset("f1"), 4.0, h);
    AlphaSystem sys(S, a, dtn);
    const Eigen::VectorXcd u =
        sys.solve(sys.incident_load(bloch_of_herglotz(dens, k, L, a)), Eigen::VectorXcd::Zero(S->periodic_count()));
    return rayleigh_coefficients(top_trace(*S, u), S->top_x(), a, dtn, 4.0).values;
  };
  const auto c1 = coeffs(0.1), c2 = coeffs(0.05), c3 = coeffs(0.025);
  const double d12 = (c1 - c2).norm(), d23 = (c2 - c3).norm();
  MESSAGE("self-convergence differences " << d12 << " " << d23 << ", ratio " << d12 / d23);
  // Pre-asymptotic: the ratio is 3.78 here and 3.99 one level finer.
  CHECK(d12 / d23 >= 3.5);
}

TEST_CASE("quasi-periodic Dirichlet problems") {
  const auto S = space_for(PeriodicSurface::flat(L, 0.0), kFlatH, 0.05);
  const DtnConfig dtn = DtnConfig::standard(k, L);
  const double a = 0.2;
  AlphaSystem sys(S, a, dtn);
  const auto& sp = S->surface_periodic();
  const Eigen::VectorXcd zero_load = Eigen::VectorXcd::Zero(S->periodic_count());
  CHECK(solve_quasi_periodic_dirichlet(sys, Eigen::VectorXcd::Zero(sp.size()), zero_load).norm() == 0.0);

  // Outgoing Rayleigh mode j = 1 prescribed on the flat surface.
  const double xi = dtn.xi(1, a);
  const cplx beta = dtn.beta(1, a);
  Eigen::VectorXcd data(sp.size());
  for (std::size_t s = 0; s < sp.size(); ++s)
    data(s) = std::exp(cplx(0, xi * S->mesh().nodes[S->node_of_periodic(sp[s])].x()));
  const Eigen::VectorXcd u = solve_quasi_periodic_dirichlet(sys, data, zero_load);
  Eigen::VectorXcd exact(S->periodic_count());
  for (int p = 0; p < S->periodic_count(); ++p) {
    const auto& x = S->mesh().nodes[S->node_of_periodic(p)];
    exact(p) = std::exp(cplx(0, xi * x.x()) + cplx(0, 1) * beta * x.y());
  }
  CHECK((u - exact).norm() <= 1e-2 * exact.norm());

  // A lifting that also spreads the data into the first interior layer gives the same field.
  Eigen::VectorXcd lift = Eigen::VectorXcd::Zero(S->periodic_count());
  for (std::size_t s = 0; s < sp.size(); ++s) lift(sp[s]) = data(s);
  const auto& m = S->mesh();
  const int stride = static_cast<int>(m.surface_chain().size());
  for (std::size_t s = 0; s < sp.size(); ++s) {
    const int above = S->node_of_periodic(sp[s]) + stride;
    lift(S->periodic_index(above)) = 0.5 * data(s) + cplx(0.3, -0.1);
  }
  CHECK((sys.solve(zero_load, lift) - u).norm() <= 1e-10 * u.norm());
}
