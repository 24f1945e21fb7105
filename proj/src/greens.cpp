#include "perisurf/greens.hpp"

#include <cmath>

#include "perisurf/errors.hpp"
#include "perisurf/hankel.hpp"
#include "perisurf/measurement.hpp"
#include "perisurf/parallel.hpp"

namespace perisurf {

namespace {

const cplx I(0.0, 1.0);

// Cell index J with x1 - J L in (-L/2, L/2].
int cell_of(double x1, double period) { return static_cast<int>(std::ceil(x1 / period - 0.5)); }

}  // namespace

SourcePoint make_source(const Eigen::Vector2d& y, const PeriodicSurface& surface, double H, double min_standoff) {
  const double below = y.y() - surface(y.x());
  const double above = H - y.y();
  const double s = std::min(below, above);
  if (!(s >= min_standoff))
    fail(ErrorKind::Domain, "source point (" + std::to_string(y.x()) + ", " + std::to_string(y.y()) +
                                ") violates the standoff from the surface or the artificial boundary");
  return SourcePoint{y, s};
}

int free_green_truncation(double k, double period, double d) {
  const double Ls = 2.0 * kPi / period;
  const double q = 39.0 / std::max(d, 1e-300);
  const double xi = std::sqrt(k * k + q * q) + 0.5 * Ls;
  return static_cast<int>(std::min(std::ceil(xi / Ls) + 1.0, 1e6));
}

cplx quasiperiodic_free_green(double alpha, const Eigen::Vector2d& x, const Eigen::Vector2d& y, double k,
                              double period, int truncation) {
  const double d = std::abs(x.y() - y.y());
  if (d < 1e-3) fail(ErrorKind::Domain, "quasi-periodic free Green series stalls for |x2 - y2| < 1e-3");
  const int T = truncation > 0 ? truncation : free_green_truncation(k, period, d);
  const double Ls = 2.0 * kPi / period;
  const double dx = x.x() - y.x();
  cplx s = 0.0;
  for (int j = -T; j <= T; ++j) {
    const double xi = Ls * j - alpha;
    const cplx b = branch_beta(k, xi);
    if (std::abs(b) < 1e-8) fail(ErrorKind::Anomaly, "Wood anomaly in the quasi-periodic free Green function");
    s += std::exp(I * (xi * dx + b * d)) / b;
  }
  return I / (2.0 * period) * s;
}

GreensEvaluation::GreensEvaluation(const BlochSolver& solver, SourcePoint source, BlochField scattered,
                                   std::vector<RayleighCoefficients> scattered_modes,
                                   std::vector<RayleighCoefficients> modes)
    : solver_(&solver),
      source_(std::move(source)),
      scattered_(std::move(scattered)),
      scattered_modes_(std::move(scattered_modes)),
      modes_(std::move(modes)) {}

cplx GreensEvaluation::free_part(const Eigen::Vector2d& x) const {
  const auto& grid = solver_->grid();
  const double L = solver_->space().period();
  const double scale = inverse_bloch_scale(grid) * std::sqrt(L / (2.0 * kPi));
  cplx s = 0.0;
  for (int l = 0; l < grid.size(); ++l)
    s += quasiperiodic_free_green(grid.alpha(l), x, source_.y, solver_->dtn().k, L);
  return scale * s;
}

cplx GreensEvaluation::plain_free_part(const Eigen::Vector2d& x) const {
  return hankel_phi(x, source_.y, solver_->dtn().k);
}

cplx GreensEvaluation::scattered_part(const Eigen::Vector2d& x) const {
  const FemSpace& S = solver_->space();
  const double H = S.height();
  if (x.y() >= H) {
    const auto v = synthesize_physical(solver_->grid(), solver_->dtn(), scattered_modes_, {x.x()}, x.y());
    return v(0);
  }
  const int J = cell_of(x.x(), S.period());
  const Eigen::Vector2d local(x.x() - J * S.period(), x.y());
  const auto hit = S.mesh().locate(local);
  if (!hit) fail(ErrorKind::Domain, "evaluation point lies below the meshed surface");
  const Eigen::VectorXcd u = solver_->physical_cell(scattered_, J);
  const auto& tri = S.mesh().triangles[hit->first];
  return hit->second(0) * u(tri[0]) + hit->second(1) * u(tri[1]) + hit->second(2) * u(tri[2]);
}

Eigen::VectorXcd GreensEvaluation::trace(const std::vector<double>& x1, double height) const {
  return synthesize_physical(solver_->grid(), solver_->dtn(), modes_, x1, height);
}

SpectralDensity GreensEvaluation::spectral_density(double height) const {
  const auto& grid = solver_->grid();
  const DtnConfig& dtn = solver_->dtn();
  SpectralDensity out;
  out.dxi = grid.reciprocal_period() / grid.size();
  const double scale = inverse_bloch_scale(grid) / out.dxi;
  std::vector<cplx> phi;
  for (const auto& r : modes_) {
    for (int j = -r.truncation; j <= r.truncation; ++j) {
      const double xi = dtn.xi(j, r.alpha);
      const cplx b = dtn.beta(j, r.alpha);
      out.xi.push_back(xi);
      out.beta.push_back(b);
      phi.push_back(scale * r(j) * std::exp(I * b * (height - r.height)));
    }
  }
  out.phi = Eigen::Map<Eigen::VectorXcd>(phi.data(), static_cast<Eigen::Index>(phi.size()));
  return out;
}

GreensEvaluation periodic_domain_green(const BlochSolver& solver, const SourcePoint& source) {
  const FemSpace& S = solver.space();
  const auto& grid = solver.grid();
  const DtnConfig& dtn = solver.dtn();
  const double L = S.period(), H = S.height();
  const double gamma = std::sqrt(L / (2.0 * kPi));
  if (!(source.standoff > 0.0) || !(source.y.y() < H)) fail(ErrorKind::Domain, "source violates the standoff");
  const int M = grid.size();
  const auto& surf = S.surface_periodic();

  BlochField field{grid, Eigen::MatrixXcd::Zero(S.periodic_count(), M)};
  const Eigen::VectorXcd zero_load = Eigen::VectorXcd::Zero(S.periodic_count());
  parallel_for(M, [&](int l) {
    Eigen::VectorXcd data(surf.size());
    for (std::size_t s = 0; s < surf.size(); ++s) {
      const Eigen::Vector2d& x = S.mesh().nodes[S.node_of_periodic(surf[s])];
      data(s) = -gamma * quasiperiodic_free_green(grid.alpha(l), x, source.y, dtn.k, L);
    }
    field.values.col(l) = solve_quasi_periodic_dirichlet(solver.system(l), data, zero_load);
  });

  auto scattered_modes = rayleigh_family(solver, field);
  const int T = std::max(dtn.truncation, free_green_truncation(dtn.k, L, H - source.y.y()));
  std::vector<RayleighCoefficients> modes;
  modes.reserve(M);
  for (int l = 0; l < M; ++l) {
    const double a = grid.alpha(l);
    RayleighCoefficients r{a, H, T, Eigen::VectorXcd::Zero(2 * T + 1)};
    for (int j = -T; j <= T; ++j) {
      const double xi = dtn.xi(j, a);
      const cplx b = dtn.beta(j, a);
      r.values(j + T) = gamma * I / (2.0 * L * b) * std::exp(I * (b * (H - source.y.y()) - xi * source.y.x()));
    }
    const auto& sc = scattered_modes[l];
    for (int j = -sc.truncation; j <= sc.truncation; ++j) r.values(j + T) += sc(j);
    modes.push_back(std::move(r));
  }
  return GreensEvaluation(solver, source, std::move(field), std::move(scattered_modes), std::move(modes));
}

namespace {

cplx weighted_overlap(const GreensEvaluation& gp, const GreensEvaluation& gq, double height, bool propagating,
                      bool with_beta, double k) {
  // Both evaluations share the grid; their mode lists differ only in truncation.
  const auto& mp = gp.modes();
  const auto& mq = gq.modes();
  if (mp.size() != mq.size()) fail(ErrorKind::Interface, "Green evaluations on different grids");
  const SpectralDensity dp = gp.spectral_density(height);
  const SpectralDensity dq = gq.spectral_density(height);
  cplx s = 0.0;
  std::size_t op = 0, oq = 0;
  for (std::size_t l = 0; l < mp.size(); ++l) {
    const int tp = mp[l].truncation, tq = mq[l].truncation;
    const int t = std::min(tp, tq);
    for (int j = -t; j <= t; ++j) {
      const std::size_t ip = op + (j + tp), iq = oq + (j + tq);
      if (propagating && std::abs(dp.xi[ip]) > k) continue;
      const cplx w = with_beta ? dp.beta[ip] : cplx(1.0);
      s += w * dp.phi(ip) * std::conj(dq.phi(iq));
    }
    op += 2 * tp + 1;
    oq += 2 * tq + 1;
  }
  return 2.0 * kPi * dp.dxi * s;
}

}  // namespace

ImaginaryIdentity imaginary_part_identity_check(const GreensEvaluation& gp, const GreensEvaluation& gq,
                                                double height) {
  ImaginaryIdentity out;
  out.lhs = gq.value(gp.source().y).imag();
  out.rhs = weighted_overlap(gp, gq, height, true, true, gp.wavenumber());
  // Scale: the Cauchy-Schwarz bound sqrt(Im G(p,p) Im G(q,q)) of the right side.
  const double spp = weighted_overlap(gp, gp, height, true, true, gp.wavenumber()).real();
  const double sqq = weighted_overlap(gq, gq, height, true, true, gp.wavenumber()).real();
  out.scale = std::max(std::abs(out.lhs), std::sqrt(std::max(spp, 0.0) * std::max(sqq, 0.0)));
  out.mismatch = std::abs(out.lhs - out.rhs) / std::max(out.scale, 1e-300);
  return out;
}

cplx spectral_overlap(const GreensEvaluation& gp, const GreensEvaluation& gq, double height,
                      bool propagating_only) {
  return weighted_overlap(gp, gq, height, propagating_only, false, gp.wavenumber());
}

}  // namespace perisurf
