#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>

#include "doctest.h"
#include "perisurf/errors.hpp"
#include "perisurf/indicator.hpp"

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

MeasuredData line_data(const std::vector<double>& x, const Eigen::VectorXcd& v, double height) {
  MeasuredData d;
  d.height = height;
  d.x1 = x;
  d.values = v;
  return d;
}

}  // namespace

TEST_CASE("sampling grid layout") {
  const auto f1 = PeriodicSurface::preset("f1");
  const auto g = sampling_grid(f1, H, 3);
  CHECK(g.points.size() == 7u * 32u);
  for (std::size_t q = 0; q < g.points.size(); ++q) {
    const double s = g.points[q].x() - g.cells[q] * L;
    CHECK(s > -L / 2);
    CHECK(s < L / 2);
    CHECK(g.points[q].y() >= f1.sup_height() + 0.2 - 1e-12);
    CHECK(g.points[q].y() <= H - 0.2 + 1e-12);
  }
}

TEST_CASE("locate_cell: spike, constant field, error category") {
  IndicatorField f;
  for (int J = -3; J <= 3; ++J)
    for (int i = 0; i < 4; ++i) {
      f.points.emplace_back(J * L + i, 3.0);
      f.cells.push_back(J);
      f.values.push_back(1.0 + 0.01 * i);
    }
  CHECK_THROWS_AS(locate_cell(f), Error);
  try {
    locate_cell(f);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AmbiguousLocator);
    CHECK(exit_code(e.kind()) == 4);
  }
  f.values[(2 + 3) * 4 + 1] = 5.0;
  CHECK(locate_cell(f) == 2);
  std::ostringstream os;
  write_indicator_csv(os, f);
  CHECK(os.str().rfind("x1,x2,value\n", 0) == 0);
}

TEST_CASE("indicator: zero data, direct quadrature, peak property") {
  const auto f1 = PeriodicSurface::preset("f1");
  Desk d(f1, 16, 0.1);
  const auto x = uniform_abscissas(-10 * kPi, 10 * kPi, kPi / 32);
  const auto grid = sampling_grid(f1, H, 2);

  const auto zero = compute_indicator(*d.solver, f1, line_data(x, Eigen::VectorXcd::Zero(x.size()), H), grid);
  for (double v : zero.values) CHECK(v == 0.0);

  // Data: the Green trace of a sampling point in cell 1.
  const std::size_t star = 32 * 3 + 8 * 2 + 5;
  REQUIRE(grid.cells[star] == 1);
  const auto gs = periodic_domain_green(*d.solver, make_source(grid.points[star], f1, H));
  const auto w = line_data(x, gs.trace(x, H), H);
  const auto field = compute_indicator(*d.solver, f1, w, grid);

  for (std::size_t q : {std::size_t(3), star, std::size_t(140)}) {
    const auto gq = periodic_domain_green(*d.solver, make_source(grid.points[q], f1, H));
    const double direct = indicator_value(x, w.values, x, gq.trace(x, H));
    CHECK(std::abs(field.values[q] - direct) <= 1e-10 * direct);
  }
  for (int J = -2; J <= 2; ++J) {
    if (J == 1) continue;
    CHECK(field.values[star + (J - 1) * 32] < field.values[star]);
  }
  CHECK(locate_cell(field) == 1);

  std::vector<double> shifted = x;
  shifted[3] += 1e-3;
  CHECK_THROWS_AS(indicator_value(x, w.values, shifted, w.values), Error);
}

TEST_CASE("f1/p1 near data locates cell 0") {
  const auto f1 = PeriodicSurface::preset("f1");
  const auto x = uniform_abscissas(-10 * kPi, 10 * kPi, kPi / 32);
  const auto dens = HerglotzDensity::standard();
  Eigen::VectorXcd U;
  {
    Desk fine(f1, 16, 0.05);
    const DiffeoField diffeo(f1, Perturbation::preset("p1", L, 0), H);
    const auto field = fine.solver->solve_perturbed(dens, diffeo);
    U = synthesize_physical(fine.solver->grid(), fine.solver->dtn(), rayleigh_family(*fine.solver, field, &dens), x, H);
  }
  Desk d(f1, 16, 0.1);
  const auto field0 = d.solver->solve_unperturbed(dens);
  const Eigen::VectorXcd U0 =
      synthesize_physical(d.solver->grid(), d.solver->dtn(), rayleigh_family(*d.solver, field0, &dens), x, H);
  const auto ind = compute_indicator(*d.solver, f1, line_data(x, U - U0, H), sampling_grid(f1, H, 3));
  CHECK(locate_cell(ind) == 0);
}

TEST_CASE("planted shifts are located from noise-free data on the model mesh") {
  const auto f2 = PeriodicSurface::preset("f2");
  const auto x = uniform_abscissas(-10 * kPi, 10 * kPi, kPi / 32);
  const auto dens = HerglotzDensity::standard();
  Desk d(f2, 16, 0.1);
  const auto field0 = d.solver->solve_unperturbed(dens);
  const Eigen::VectorXcd U0 =
      synthesize_physical(d.solver->grid(), d.solver->dtn(), rayleigh_family(*d.solver, field0, &dens), x, H);
  const auto grid = sampling_grid(f2, H, 3);
  for (int J : {-2, 1}) {
    const DiffeoField diffeo(f2, Perturbation::preset("p2", L, J), H);
    const auto field = d.solver->solve_perturbed(dens, diffeo);
    const Eigen::VectorXcd U =
        synthesize_physical(d.solver->grid(), d.solver->dtn(), rayleigh_family(*d.solver, field, &dens), x, H);
    CHECK(locate_cell(compute_indicator(*d.solver, f2, line_data(x, U - U0, H), grid)) == J);
  }
}
