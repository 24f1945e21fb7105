#include <cmath>
#include <memory>

#include "doctest.h"
#include "perisurf/bloch_solver.hpp"
#include "perisurf/errors.hpp"

using namespace perisurf;

namespace {

const double L = 2 * kPi;
const double k = 3.0;
const double H = 4.0;

struct Desk {
  std::shared_ptr<FemSpace> space;
  std::unique_ptr<BlochSolver> solver;
  Desk(const PeriodicSurface& s, int M, double h) {
    space = std::make_shared<FemSpace>(build_cell_mesh(s, H, h), k);
    solver = std::make_unique<BlochSolver>(space, QuasiMomentumGrid(M, L, k), DtnConfig::standard(k, L));
  }
};

Eigen::VectorXcd top_of(const FemSpace& S, const Eigen::VectorXcd& periodic) {
  Eigen::VectorXcd t(S.top_periodic().size());
  for (std::size_t q = 0; q < S.top_periodic().size(); ++q) t(q) = periodic(S.top_periodic()[q]);
  return t;
}

// Solves the periodic P1 mass system on the top boundary.
Eigen::VectorXcd top_mass_solve(const std::vector<double>& x, const Eigen::VectorXcd& r) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd Mt = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    const int b = (a + 1) % n;
    const double h = (b == 0 ? x[0] + L : x[b]) - x[a];
    Mt(a, a) += h / 3;
    Mt(b, b) += h / 3;
    Mt(a, b) += h / 6;
    Mt(b, a) += h / 6;
  }
  return Mt.cast<cplx>().lu().solve(r);
}

}  // namespace

TEST_CASE("zero perturbation reproduces the unperturbed solve") {
  Desk d(PeriodicSurface::preset("f1"), 16, 0.1);
  const auto dens = HerglotzDensity::standard();
  const BlochField w0 = d.solver->solve_unperturbed(dens);
  const DiffeoField id(PeriodicSurface::preset("f1"), Perturbation::zero(L), H);
  const BlochField w1 = d.solver->solve_perturbed(dens, id);
  CHECK((w1.values - w0.values).norm() <= 1e-10 * w0.values.norm());
}

TEST_CASE("f1/p1 perturbed solve: boundary and radiation residuals") {
  const auto f1 = PeriodicSurface::preset("f1");
  Desk d(f1, 16, 0.05);
  const FemSpace& S = *d.space;
  const auto dens = HerglotzDensity::standard();
  const DiffeoField phi(f1, Perturbation::preset("p1", L), H);
  const CouplingBlock cb = assemble_coupling(S, phi);
  CHECK(!cb.empty());
  CHECK((Eigen::MatrixXd(cb.B) - Eigen::MatrixXd(cb.B).transpose()).norm() <= 1e-12 * Eigen::MatrixXd(cb.B).norm());
  SolveStats stats;
  const BlochField w = d.solver->solve(d.solver->incident_loads(dens), &cb, nullptr, 0, &stats);
  MESSAGE("coupled iterations " << stats.iterations << ", residual " << stats.relative_residual);
  CHECK(stats.relative_residual <= 1e-8);

  // Physical field vanishes on the (pulled back) surface of every cell.
  for (int j : {-1, 0, 1}) {
    const Eigen::VectorXcd u = d.solver->physical_cell(w, j);
    for (int v : S.mesh().surface_chain()) CHECK(std::abs(u(v)) <= 1e-8);
  }

  // Radiation: variational top flux of the scattered part against T applied to its trace.
  const Eigen::VectorXcd y = d.solver->physical_cell(w, 0);
  const Eigen::VectorXcd By = cb.B.cast<cplx>() * y;
  const double gamma = std::sqrt(L / (2 * kPi));
  double num = 0.0, den = 0.0;
  for (int l = 0; l < d.solver->size(); ++l) {
    const double a = d.solver->grid().alpha(l);
    const AlphaSystem& sys = d.solver->system(l);
    const auto inc = bloch_of_herglotz(dens, k, L, a);
    Eigen::VectorXcd r = sys.matrix() * w.values.col(l) + gamma * S.collapse(By, a);
    // Put the DtN term back: r now holds the volume residual only.
    const Eigen::VectorXcd trace = top_of(S, w.values.col(l));
    const Eigen::VectorXcd rt = top_of(S, r) + sys.dtn_block() * trace;
    const Eigen::VectorXcd flux = top_mass_solve(S.top_x(), rt);
    Eigen::VectorXcd inc_trace(trace.size()), inc_flux(trace.size());
    for (std::size_t q = 0; q < S.top_x().size(); ++q) {
      inc_trace(q) = inc.value(S.top_x()[q], H);
      inc_flux(q) = inc.dx2(S.top_x()[q], H);
    }
    // Modal comparison through the exact L2 analysis of the P1 traces.
    const Eigen::MatrixXcd& F = sys.top_projection();
    const Eigen::VectorXcd fs = F.transpose() * (flux - inc_flux);
    const Eigen::VectorXcd us = F.transpose() * (trace - inc_trace);
    for (int j = -d.solver->dtn().truncation; j <= d.solver->dtn().truncation; ++j) {
      const int c = j + d.solver->dtn().truncation;
      const cplx ts = cplx(0, 1) * d.solver->dtn().beta(j, a) * us(c);
      num += std::norm(fs(c) - ts);
      den += std::norm(ts);
    }
  }
  MESSAGE("radiation residual " << std::sqrt(num / den));
  CHECK(std::sqrt(num / den) <= 1e-2);
}

TEST_CASE("flux recovery on the flat surface") {
  const auto flat = PeriodicSurface::flat(L, 2.0);
  Desk d(flat, 16, 0.05);
  const FemSpace& S = *d.space;
  const int i = 10;
  const double a = d.solver->grid().alpha(i);
  // Plane wave from direction t (from the vertical) folded exactly onto alpha_i via mode m = 1.
  const double t = std::asin((1.0 - a) / k);
  IncidentModes inc;
  inc.alpha = a;
  inc.period = L;
  inc.k = k;
  inc.m = {1};
  inc.amp = {1.0};
  Eigen::MatrixXcd loads = Eigen::MatrixXcd::Zero(S.periodic_count(), d.solver->size());
  loads.col(i) = d.solver->system(i).incident_load(inc);
  const BlochField w = d.solver->solve(loads, nullptr, nullptr, 0);
  const double c = inverse_bloch_scale(d.solver->grid());
  for (int cell : {0, 2}) {
    const SurfaceTrace f = d.solver->surface_flux(w, nullptr, cell);
    double err = 0.0, ref = 0.0;
    for (std::size_t q = 0; q < f.x1.size(); ++q) {
      const double x = f.x1[q];
      // d/dx2 of exp(i(xi x - b (x2-2))) - exp(i(xi x + b (x2-2))) at x2 = 2.
      const double b = k * std::cos(t);
      const cplx dn = c * std::exp(cplx(0, -a * L * cell)) * cplx(0, -2 * b) * std::exp(cplx(0, (1.0 - a) * x)) *
                      std::exp(cplx(0, -b * 2.0));
      err = std::max(err, std::abs(-f.values(q) - dn));
      ref = std::max(ref, std::abs(dn));
    }
    MESSAGE("flux error " << err / ref);
    CHECK(err <= 2e-2 * ref);
  }
}

TEST_CASE("f1/p1 against a supercell solve on the physically perturbed mesh") {
  // With M alpha nodes the discrete Bloch family is exactly the M-cell
  // supercell problem at quasimomentum pi/(M L); the reference meshes the
  // perturbed surface directly instead of pulling it back.
  const int M = 8;
  const double h = 0.1;
  const auto f1 = PeriodicSurface::preset("f1");
  const auto p1 = Perturbation::preset("p1", L);
  const auto dens = HerglotzDensity::standard();
  Desk d(f1, M, h);
  const DiffeoField phi(f1, p1, H);
  const BlochField w = d.solver->solve_perturbed(dens, phi);
  const Eigen::VectorXcd u0 = d.solver->physical_cell(w, 0);

  const double P = M * L;
  const double as = kPi / P;
  auto S = std::make_shared<FemSpace>(build_cell_mesh([&](double x) { return f1(x) + p1(x); }, P, H, h), k);
  IncidentModes inc;
  inc.alpha = as;
  inc.period = P;
  inc.k = k;
  const double c = inverse_bloch_scale(d.solver->grid());
  for (int l = 0; l < M; ++l) {
    const auto md = bloch_of_herglotz(dens, k, L, d.solver->grid().alpha(l));
    for (std::size_t q = 0; q < md.m.size(); ++q) {
      const double n = (md.xi(static_cast<int>(q)) + as) * P / (2 * kPi);
      REQUIRE(std::abs(n - std::round(n)) <= 1e-9);
      inc.m.push_back(static_cast<int>(std::lround(n)));
      inc.amp.push_back(c * md.amp[q]);
    }
  }
  AlphaSystem sys(S, as, DtnConfig::standard(k, P));
  const Eigen::VectorXcd ref =
      S->expand(sys.solve(sys.incident_load(inc), Eigen::VectorXcd::Zero(S->periodic_count())), as);

  const auto& m = d.space->mesh();
  double num = 0.0, den = 0.0;
  for (int v = 0; v < m.node_count(); ++v) {
    Eigen::Vector2d X = phi.map(m.nodes[v]);
    auto loc = S->mesh().locate(X);
    // Points on the curved surface can sit just below the reference polygon.
    for (int t = 0; t < 100 && !loc; ++t) {
      X.y() += 1e-4;
      loc = S->mesh().locate(X);
    }
    REQUIRE(loc.has_value());
    cplx r = 0.0;
    for (int q = 0; q < 3; ++q) r += loc->second(q) * ref(S->mesh().triangles[loc->first][q]);
    num += std::norm(u0(v) - r);
    den += std::norm(r);
  }
  MESSAGE("supercell mismatch " << std::sqrt(num / den));
  CHECK(std::sqrt(num / den) <= 5e-2);
}

TEST_CASE("coupling block is invariant under a cell shift") {
  const auto f2 = PeriodicSurface::preset("f2");
  Desk d(f2, 8, 0.2);
  const CouplingBlock c0 = assemble_coupling(*d.space, DiffeoField(f2, Perturbation::preset("p2", L, 0), H));
  const CouplingBlock c2 = assemble_coupling(*d.space, DiffeoField(f2, Perturbation::preset("p2", L, -2), H));
  CHECK(c2.cell == -2);
  CHECK(c0.support == c2.support);
  const Eigen::MatrixXd B0(c0.B), B2(c2.B);
  CHECK((B0 - B2).norm() <= 1e-12 * B0.norm());
}
