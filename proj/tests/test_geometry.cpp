#include <cmath>
#include <random>

#include "doctest.h"
#include "perisurf/diffeo.hpp"
#include "perisurf/errors.hpp"
#include "perisurf/perturbation.hpp"
#include "perisurf/spline.hpp"
#include "perisurf/surface.hpp"

using namespace perisurf;

TEST_CASE("surface presets and periodicity") {
  const auto f1 = PeriodicSurface::preset("f1");
  const auto f3 = PeriodicSurface::preset("f3");
  CHECK(f1(0.0) == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(f1(2 * kPi) == doctest::Approx(2.25).epsilon(1e-14));
  CHECK(f3(0.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(f1.sup_height() == doctest::Approx(2.25).epsilon(1e-12));
  CHECK(f1.inf_height() == doctest::Approx(1.75).epsilon(1e-12));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-50.0, 50.0);
  for (const auto& name : {"f1", "f2", "f3"}) {
    const auto f = PeriodicSurface::preset(name);
    for (int i = 0; i < 100; ++i) {
      const double x = U(rng);
      CHECK(std::abs(f(x + f.period()) - f(x)) <= 1e-12);
      const double h = 1e-5;
      CHECK(f.derivative(x) == doctest::Approx((f(x + h) - f(x - h)) / (2 * h)).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(PeriodicSurface::preset("f9"), Error);
}

TEST_CASE("spline basis: endpoint flatness, reproduction, projection") {
  const auto basis = Perturbation::cell_basis(2 * kPi, 10);
  CHECK(basis.size() == 10);
  for (int n = 0; n < basis.size(); ++n) {
    for (double x : {basis.lower(), basis.upper()}) {
      CHECK(basis.value(n, x) == 0.0);
      CHECK(basis.derivative(n, x) == 0.0);
      CHECK(basis.second_derivative(n, x) == 0.0);
    }
    const auto [lo, hi] = basis.support(n);
    const double x = 0.3 * lo + 0.7 * hi, h = 1e-5;
    CHECK(basis.derivative(n, x) ==
          doctest::Approx((basis.value(n, x + h) - basis.value(n, x - h)) / (2 * h)).epsilon(1e-7));
  }
  const Eigen::MatrixXd G = basis.gram();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
  CHECK(svd.singularValues().minCoeff() > 1e-6 * svd.singularValues().maxCoeff());

  auto zero = project_onto_basis([](double) { return 0.0; }, basis);
  CHECK(zero.coefficients.norm() == 0.0);
  auto e2 = project_onto_basis([&](double x) { return basis.value(2, x); }, basis);
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(10);
  unit(2) = 1.0;
  CHECK((e2.coefficients - unit).norm() <= 1e-10);

  // Oracle: least squares on a dense sample grid.
  const auto p1 = Perturbation::preset("p1", 2 * kPi);
  auto proj = project_onto_basis([&](double s) { return p1.local_value(s); }, basis);
  CHECK(proj.relative_residual < 5e-2);
  const int S = 4000;
  Eigen::MatrixXd A(S, 10);
  Eigen::VectorXd b(S);
  for (int i = 0; i < S; ++i) {
    const double s = basis.lower() + (basis.upper() - basis.lower()) * (i + 0.5) / S;
    for (int n = 0; n < 10; ++n) A(i, n) = basis.value(n, s);
    b(i) = p1.local_value(s);
  }
  const Eigen::VectorXd ls = A.colPivHouseholderQr().solve(b);
  CHECK((ls - proj.coefficients).norm() <= 1e-3 * ls.norm());
}

TEST_CASE("perturbation presets, support, json") {
  const double L = 2 * kPi;
  const auto p1 = Perturbation::preset("p1", L);
  CHECK(p1(0.0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(std::abs(p1(kPi)) <= 1e-15);
  CHECK(std::abs(p1(-kPi)) <= 1e-15);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(kPi, 40.0);
  const auto basis = Perturbation::cell_basis(L, 10);
  Eigen::VectorXd c = Eigen::VectorXd::Random(10);
  const auto ps = Perturbation::spline(basis, c, 2, L);
  for (int i = 0; i < 1000; ++i) {
    const double x = U(rng);
    CHECK(p1(x) == 0.0);
    CHECK(p1(-x) == 0.0);
    const double y = (i % 2 ? 1.0 : -1.0) * U(rng) + 2 * L;
    if (std::abs(y - 2 * L) >= kPi) CHECK(ps(y) == 0.0);
  }
  CHECK(Perturbation::spline(basis, Eigen::VectorXd::Zero(10), 0, L).is_zero());

  const auto back = Perturbation::from_json(ps.to_json(), L);
  CHECK(back.cell_index() == 2);
  CHECK((back.coefficients() - c).norm() == 0.0);
  for (double s : {-2.0, 0.1, 1.7}) CHECK(back(s + 2 * L) == ps(s + 2 * L));
  auto bad = ps.to_json();
  bad["bogus"] = 1;
  CHECK_THROWS_AS(Perturbation::from_json(bad, L), Error);

  // p3 is C2 at both support ends in the default reading only.
  const auto p3 = Perturbation::preset("p3", L);
  const auto p3l = Perturbation::preset("p3", L, 0, true);
  CHECK(std::abs(p3.local_second_derivative(-3.0 + 1e-9)) <= 1e-6);
  CHECK(std::abs(p3l.local_second_derivative(-3.0 + 1e-9)) > 1e-3);
}

TEST_CASE("diffeomorphism and material coefficients") {
  const double L = 2 * kPi, H = 4.0;
  const auto f1 = PeriodicSurface::preset("f1");
  const auto p1 = Perturbation::preset("p1", L);
  DiffeoField phi(f1, p1, H);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-kPi, kPi);
  for (int i = 0; i < 100; ++i) {
    const double x1 = U(rng);
    CHECK(std::abs(phi.map({x1, f1(x1)}).y() - (f1(x1) + p1(x1))) <= 1e-12);
    CHECK((phi.map({x1, H}) - Eigen::Vector2d(x1, H)).norm() == 0.0);
  }
  for (int i = 0; i < 20; ++i) {
    const double x1 = U(rng);
    const Eigen::Vector2d x(x1, f1(x1) + 0.6 * (H - f1(x1)));
    const double h = 1e-6;
    Eigen::Matrix2d fd;
    fd.col(0) = (phi.map(x + Eigen::Vector2d(h, 0)) - phi.map(x - Eigen::Vector2d(h, 0))) / (2 * h);
    fd.col(1) = (phi.map(x + Eigen::Vector2d(0, h)) - phi.map(x - Eigen::Vector2d(0, h))) / (2 * h);
    CHECK((phi.jacobian(x) - fd).cwiseAbs().maxCoeff() <= 1e-6);
    const auto s = phi.material(x);
    CHECK(std::abs(s.A(0, 1) - s.A(1, 0)) <= 1e-14);
    const double det = fd.determinant();
    const Eigen::Matrix2d Afd = std::abs(det) * fd.inverse() * fd.inverse().transpose();
    CHECK((s.A - Afd).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(s.A.selfadjointView<Eigen::Upper>().eigenvalues().minCoeff() > 0.0);
  }
  // Identity zone outside the perturbed cell.
  for (double x1 : {-4.0, 3.5, 7.0, -10.0}) {
    const auto s = material_coefficients(phi, {x1, 3.0});
    CHECK((s.A - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(std::abs(s.c - 1.0) <= 1e-14);
  }
  DiffeoField id(f1, Perturbation::zero(L), H);
  CHECK((id.jacobian({0.3, 3.0}) - Eigen::Matrix2d::Identity()).norm() == 0.0);
  CHECK_THROWS_AS(DiffeoField(f1, p1, 2.25), Error);
  // A perturbation pushing the surface to the top boundary is rejected.
  const auto basis = Perturbation::cell_basis(L, 10);
  const auto big = Perturbation::spline(basis, Eigen::VectorXd::Constant(10, 2.5), 0, L);
  try {
    DiffeoField bad(f1, big, H);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::InvalidPerturbation || e.kind() == ErrorKind::Geometry));
  }
}
