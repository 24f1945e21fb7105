#include "perisurf/bloch_solver.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "perisurf/errors.hpp"
#include "perisurf/gmres.hpp"
#include "perisurf/parallel.hpp"

namespace perisurf {

namespace {

// Degree-5 seven-point rule on the reference triangle (barycentric, weights sum to 1).
struct TriRule {
  std::array<Eigen::Vector3d, 7> bary;
  std::array<double, 7> w;
};

const TriRule& seven_point() {
  static const TriRule rule = [] {
    TriRule r;
    const double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
    r.bary[0] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    r.w[0] = 0.225;
    r.bary[1] = {a1, b1, b1};
    r.bary[2] = {b1, a1, b1};
    r.bary[3] = {b1, b1, a1};
    r.bary[4] = {a2, b2, b2};
    r.bary[5] = {b2, a2, b2};
    r.bary[6] = {b2, b2, a2};
    for (int q = 1; q < 4; ++q) r.w[q] = w1;
    for (int q = 4; q < 7; ++q) r.w[q] = w2;
    return r;
  }();
  return rule;
}

}  // namespace

CouplingBlock assemble_coupling(const FemSpace& space, const DiffeoField& diffeo) {
  CouplingBlock cb;
  const Perturbation& p = diffeo.perturbation();
  cb.cell = p.cell_index();
  const CellMesh& m = space.mesh();
  const int n = m.node_count();
  cb.B.resize(n, n);
  if (p.is_zero()) return cb;
  const double shift = cb.cell * m.period;
  const double k2 = space.k() * space.k();
  const auto& rule = seven_point();
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<char> touched(n, 0);
  for (const auto& t : m.triangles) {
    const auto &a = m.nodes[t[0]], &b = m.nodes[t[1]], &c = m.nodes[t[2]];
    const double twice = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
    const double area = 0.5 * std::abs(twice);
    std::array<Eigen::Vector2d, 3> grad;
    const std::array<Eigen::Vector2d, 3> pts{a, b, c};
    for (int i = 0; i < 3; ++i) {
      const auto& pj = pts[(i + 1) % 3];
      const auto& pk = pts[(i + 2) % 3];
      grad[i] = Eigen::Vector2d(pj.y() - pk.y(), pk.x() - pj.x()) / twice;
    }
    Eigen::Matrix2d dA = Eigen::Matrix2d::Zero();
    Eigen::Matrix3d dc = Eigen::Matrix3d::Zero();
    double dev = 0.0;
    for (int q = 0; q < 7; ++q) {
      const Eigen::Vector3d& l = rule.bary[q];
      Eigen::Vector2d x = l(0) * a + l(1) * b + l(2) * c;
      x.x() += shift;
      const MaterialSample s = material_coefficients(diffeo, x);
      const Eigen::Matrix2d Ai = s.A - Eigen::Matrix2d::Identity();
      dA += rule.w[q] * area * Ai;
      dc += rule.w[q] * area * (s.c - 1.0) * (l * l.transpose());
      dev = std::max({dev, Ai.cwiseAbs().maxCoeff(), std::abs(s.c - 1.0)});
    }
    if (dev == 0.0) continue;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(t[i], t[j], grad[i].dot(dA * grad[j]) - k2 * dc(i, j));
    for (int i = 0; i < 3; ++i) touched[t[i]] = 1;
  }
  cb.B.setFromTriplets(trip.begin(), trip.end());
  for (int v = 0; v < n; ++v)
    if (touched[v]) cb.support.push_back(v);
  return cb;
}

BlochSolver::BlochSolver(std::shared_ptr<const FemSpace> space, const QuasiMomentumGrid& grid,
                         const DtnConfig& dtn, SolverTolerances tolerances)
    : space_(std::move(space)), grid_(grid), dtn_(dtn), tol_(tolerances) {
  systems_.resize(grid_.size());
  parallel_for(grid_.size(), [&](int i) {
    try {
      systems_[i] = std::make_unique<AlphaSystem>(space_, grid_.alpha(i), dtn_);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "alpha node " << i << ": " << e.what();
      throw Error(e.kind(), os.str());
    }
  });
}

Eigen::MatrixXcd BlochSolver::incident_loads(const HerglotzDensity& density) const {
  Eigen::MatrixXcd loads(space_->periodic_count(), size());
  parallel_for(size(), [&](int i) {
    loads.col(i) = systems_[i]->incident_load(bloch_of_herglotz(density, dtn_.k, space_->period(), grid_.alpha(i)));
  });
  return loads;
}

BlochField BlochSolver::solve(const Eigen::MatrixXcd& loads, const CouplingBlock* coupling,
                              const Eigen::VectorXcd* dirichlet, int cell, SolveStats* stats) const {
  const FemSpace& S = *space_;
  const CellMesh& m = S.mesh();
  const int M = size();
  const double L = S.period();
  const double gamma = std::sqrt(L / (2.0 * kPi));
  const double c = inverse_bloch_scale(grid_);
  if (loads.rows() != S.periodic_count() || loads.cols() != M)
    fail(ErrorKind::Interface, "load matrix has the wrong shape");
  if (coupling && !coupling->empty() && coupling->cell != cell)
    fail(ErrorKind::Interface, "coupling and Dirichlet data refer to different cells");
  auto cell_phase = [&](int l) { return std::exp(cplx(0.0, L * cell * grid_.alpha(l))); };

  // Per-alpha liftings and uncoupled solves.
  std::vector<Eigen::VectorXcd> lift(M), r0(M);
  parallel_for(M, [&](int l) {
    lift[l] = Eigen::VectorXcd::Zero(S.periodic_count());
    if (dirichlet) {
      for (int v = 0; v < m.node_count(); ++v) {
        const cplx d = (*dirichlet)(v);
        if (d == 0.0) continue;
        if (!m.is(v, CellMesh::kSurface))
          fail(ErrorKind::Interface, "Dirichlet data given off the surface");
        if (m.is(v, CellMesh::kLeft) || m.is(v, CellMesh::kRight))
          fail(ErrorKind::Interface, "Dirichlet data must vanish at the cell corners");
        lift[l](S.periodic_index(v)) = gamma * cell_phase(l) * d;
      }
    }
    r0[l] = systems_[l]->solve(loads.col(l), lift[l]);
  });

  BlochField out{grid_, Eigen::MatrixXcd(S.periodic_count(), M)};
  if (stats) *stats = SolveStats{};
  if (!coupling || coupling->empty()) {
    for (int l = 0; l < M; ++l) out.values.col(l) = r0[l];
    return out;
  }

  const auto& sup = coupling->support;
  const int ns = static_cast<int>(sup.size());
  auto to_full = [&](const Eigen::VectorXcd& ys) {
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(m.node_count());
    for (int s = 0; s < ns; ++s) y(sup[s]) = ys(s);
    return y;
  };
  // sum_l E_l A_l^{-1} E_l^H (B y), returned on the full node set of the cell,
  // together with the per-alpha corrections A_l^{-1} E_l^H B y (free dofs).
  auto coupled_response = [&](const Eigen::VectorXcd& ys, std::vector<Eigen::VectorXcd>* corr) {
    const Eigen::VectorXcd By = coupling->B.cast<cplx>() * to_full(ys);
    std::vector<Eigen::VectorXcd> part(M);
    parallel_for(M, [&](int l) {
      const double a = grid_.alpha(l);
      const Eigen::VectorXcd q = S.collapse(By, a);
      Eigen::VectorXcd qf(S.free_count());
      for (int f = 0; f < S.free_count(); ++f) qf(f) = q(S.free_periodic()[f]);
      const Eigen::VectorXcd sf = systems_[l]->solve_free(qf);
      Eigen::VectorXcd sp = Eigen::VectorXcd::Zero(S.periodic_count());
      for (int f = 0; f < S.free_count(); ++f) sp(S.free_periodic()[f]) = sf(f);
      if (corr) (*corr)[l] = sp;
      part[l] = S.expand(sp, a);
    });
    Eigen::VectorXcd total = Eigen::VectorXcd::Zero(m.node_count());
    for (const auto& p : part) total += p;
    return total;
  };

  // Right-hand side: physical cell field of the uncoupled solves.
  Eigen::VectorXcd y0 = Eigen::VectorXcd::Zero(m.node_count());
  for (int l = 0; l < M; ++l) y0 += c * std::conj(cell_phase(l)) * S.expand(r0[l], grid_.alpha(l));
  Eigen::VectorXcd y0s(ns);
  for (int s = 0; s < ns; ++s) y0s(s) = y0(sup[s]);

  auto op = [&](const Eigen::VectorXcd& ys) {
    const Eigen::VectorXcd resp = coupled_response(ys, nullptr);
    Eigen::VectorXcd out_s(ns);
    for (int s = 0; s < ns; ++s) out_s(s) = ys(s) + resp(sup[s]) / static_cast<double>(M);
    return out_s;
  };
  const GmresResult gr = gmres(op, y0s, tol_.tol, tol_.max_iterations, tol_.restart);
  if (stats) *stats = SolveStats{gr.iterations, gr.relative_residual};
  if (!gr.converged) {
    std::ostringstream os;
    os << "coupled solve did not converge: relative residual " << gr.relative_residual << " after "
       << gr.iterations << " iterations";
    fail(ErrorKind::Solver, os.str());
  }
  std::vector<Eigen::VectorXcd> corr(M);
  coupled_response(gr.x, &corr);
  for (int l = 0; l < M; ++l) out.values.col(l) = r0[l] - gamma * cell_phase(l) * corr[l];
  return out;
}

BlochField BlochSolver::solve_unperturbed(const HerglotzDensity& density) const {
  return solve(incident_loads(density), nullptr, nullptr, 0);
}

BlochField BlochSolver::solve_perturbed(const HerglotzDensity& density, const DiffeoField& diffeo,
                                        SolveStats* stats) const {
  const CouplingBlock cb = assemble_coupling(*space_, diffeo);
  return solve(incident_loads(density), &cb, nullptr, cb.cell, stats);
}

Eigen::VectorXcd BlochSolver::physical_cell(const BlochField& field, int cell) const {
  const double c = inverse_bloch_scale(grid_);
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(space_->mesh().node_count());
  for (int l = 0; l < size(); ++l) {
    const double a = grid_.alpha(l);
    u += c * std::exp(cplx(0.0, -a * space_->period() * cell)) * space_->expand(field.values.col(l), a);
  }
  return u;
}

SurfaceTrace BlochSolver::surface_flux(const BlochField& field, const CouplingBlock* coupling, int cell) const {
  const FemSpace& S = *space_;
  const CellMesh& m = S.mesh();
  const double k2 = S.k() * S.k();
  auto residual = [&](int j) -> Eigen::VectorXcd {
    const Eigen::VectorXcd u = physical_cell(field, j);
    Eigen::VectorXcd r = S.stiffness().cast<cplx>() * u - k2 * (S.mass().cast<cplx>() * u);
    if (coupling && !coupling->empty() && coupling->cell == j) r += coupling->B.cast<cplx>() * u;
    return r;
  };
  // The neighbouring cells enter through the corner hat functions; the window
  // J-1..J+1 is solved as one chain and its middle block kept (the inverse
  // mass matrix decays geometrically away from the truncated window ends).
  const auto chain = m.surface_chain();
  const int n = static_cast<int>(chain.size());
  const std::array<Eigen::VectorXcd, 3> r{residual(cell - 1), residual(cell), residual(cell + 1)};
  const int total = 3 * (n - 1) + 1;
  Eigen::VectorXcd R = Eigen::VectorXcd::Zero(total);
  std::vector<double> xs(total);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < n; ++i) {
      const int g = c * (n - 1) + i;
      R(g) += r[c](chain[i]);
      xs[g] = m.nodes[chain[i]].x() + (c - 1) * m.period;
    }
  std::vector<double> diag(total, 0.0), off(total, 0.0);
  for (int i = 0; i + 1 < total; ++i) {
    const double h = xs[i + 1] - xs[i];
    diag[i] += h / 3.0;
    diag[i + 1] += h / 3.0;
    off[i] = h / 6.0;
  }
  std::vector<double> cp(total);
  Eigen::VectorXcd dp(total);
  cp[0] = off[0] / diag[0];
  dp(0) = R(0) / diag[0];
  for (int i = 1; i < total; ++i) {
    const double den = diag[i] - off[i - 1] * cp[i - 1];
    cp[i] = (i + 1 < total) ? off[i] / den : 0.0;
    dp(i) = (R(i) - off[i - 1] * dp(i - 1)) / den;
  }
  Eigen::VectorXcd lam(total);
  lam(total - 1) = dp(total - 1);
  for (int i = total - 2; i >= 0; --i) lam(i) = dp(i) - cp[i] * lam(i + 1);

  SurfaceTrace out;
  out.cell = cell;
  out.x1.resize(n);
  for (int i = 0; i < n; ++i) out.x1[i] = m.nodes[chain[i]].x();
  out.values = lam.segment(n - 1, n);
  return out;
}

}  // namespace perisurf
