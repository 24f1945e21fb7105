#include "perisurf/inversion.hpp"

#include <cmath>
#include <cstring>

#include "perisurf/errors.hpp"
#include "perisurf/parallel.hpp"

namespace perisurf {

namespace {

const cplx I(0.0, 1.0);

struct Fnv {
  std::uint64_t h = 1469598103934665603ull;
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) h = (h ^ c[i]) * 1099511628211ull;
  }
  void num(double v) { bytes(&v, sizeof v); }
  void num(int v) { bytes(&v, sizeof v); }
  void vec(const std::vector<double>& v) {
    for (double x : v) num(x);
  }
};

// P1 interpolant of nodal values (xs, f) at x, zero outside.
double p1_at(const std::vector<double>& xs, const std::vector<double>& f, double x) {
  if (x < xs.front() || x > xs.back()) return 0.0;
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - xs.begin(), 1), xs.size() - 1);
  const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return (1 - t) * f[i - 1] + t * f[i];
}

}  // namespace

ScatteringContext::ScatteringContext(ForwardSetup setup)
    : setup_(std::move(setup)),
      basis_(Perturbation::cell_basis(setup_.surface.period(), setup_.spline_count)),
      w0_{QuasiMomentumGrid(2, 1.0), {}} {
  const double L = setup_.surface.period();
  if (setup_.height < setup_.H) fail(ErrorKind::Config, "data line lies below the artificial boundary");
  if (setup_.x1.empty()) fail(ErrorKind::Config, "no data abscissas");
  const auto n = static_cast<Eigen::Index>(setup_.x1.size());
  if (setup_.data_map.size() != 0 && (setup_.data_map.rows() != n || setup_.data_map.cols() != n))
    fail(ErrorKind::Config, "data map does not match the abscissas");
  space_ = std::make_shared<FemSpace>(build_cell_mesh(setup_.surface, setup_.H, setup_.mesh_h), setup_.k);
  solver_ = std::make_unique<BlochSolver>(space_, QuasiMomentumGrid(setup_.M, L, setup_.k),
                                          DtnConfig::standard(setup_.k, L), setup_.tolerances);
  weights_ = trapezoid_weights(setup_.x1);
  w0_ = solver_->solve_unperturbed(setup_.incident);
  U0_ = measure(w0_, &setup_.incident);

  Fnv f;
  f.num(L);
  f.num(setup_.surface.mean());
  f.vec(setup_.surface.cos_coeffs());
  f.vec(setup_.surface.sin_coeffs());
  f.num(setup_.incident.lo);
  f.num(setup_.incident.hi);
  for (double t = -1.5; t <= 1.5; t += 0.125) f.num(setup_.incident(t));
  f.num(setup_.k);
  f.num(setup_.H);
  f.num(setup_.mesh_h);
  f.num(setup_.M);
  f.num(setup_.height);
  f.vec(setup_.x1);
  f.num(setup_.cell);
  f.num(setup_.spline_count);
  f.bytes(setup_.data_map.data(), sizeof(cplx) * static_cast<std::size_t>(setup_.data_map.size()));
  tag_ = f.h;
}

Perturbation ScatteringContext::perturbation(const Eigen::VectorXd& C) const {
  return Perturbation::spline(basis_, C, setup_.cell, setup_.surface.period());
}

Eigen::VectorXcd ScatteringContext::measure(const BlochField& field, const HerglotzDensity* incident) const {
  Eigen::VectorXcd v = synthesize_physical(solver_->grid(), solver_->dtn(), rayleigh_family(*solver_, field, incident),
                                           setup_.x1, setup_.height);
  if (setup_.data_map.size() != 0) v = setup_.data_map * v;
  return v;
}

Eigen::VectorXcd ScatteringContext::forward(const Eigen::VectorXd& C, SolveStats* stats) const {
  const DiffeoField diffeo(setup_.surface, perturbation(C), setup_.H);
  const CouplingBlock cb = assemble_coupling(*space_, diffeo);
  const BlochField w = solver_->solve(solver_->incident_loads(setup_.incident), &cb, nullptr, setup_.cell, stats);
  return measure(w, &setup_.incident);
}

double ScatteringContext::inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += weights_[i] * (a(i) * std::conj(b(i))).real();
  return s;
}

double ScatteringContext::norm(const Eigen::VectorXcd& v) const { return std::sqrt(std::max(inner(v, v), 0.0)); }

std::uint64_t linearization_tag(std::uint64_t context_tag, const Eigen::VectorXd& C) {
  Fnv f;
  f.bytes(&context_tag, sizeof context_tag);
  for (Eigen::Index i = 0; i < C.size(); ++i) f.num(C(i));
  return f.h;
}

LinearizationPoint linearize(const ScatteringContext& ctx, const Eigen::VectorXd& C) {
  const auto& s = ctx.setup();
  const BlochSolver& solver = ctx.solver();
  const Perturbation p = ctx.perturbation(C);
  const DiffeoField diffeo(s.surface, p, s.H);
  LinearizationPoint pt;
  pt.coefficients = C;
  pt.tag = linearization_tag(ctx.tag(), C);
  pt.coupling = assemble_coupling(solver.space(), diffeo);
  pt.field = solver.solve(solver.incident_loads(s.incident), &pt.coupling, nullptr, s.cell, &pt.stats);
  pt.flux = solver.surface_flux(pt.field, &pt.coupling, s.cell);
  const double L = s.surface.period();
  for (double x : pt.flux.x1) {
    const double slope = s.surface.derivative(x + s.cell * L) + p.local_derivative(x);
    pt.slope_factor.push_back(1.0 + slope * slope);
  }
  pt.data = ctx.measure(pt.field, &s.incident);
  return pt;
}

namespace {

void check_fresh(const ScatteringContext& ctx, const LinearizationPoint& point) {
  if (point.tag != linearization_tag(ctx.tag(), point.coefficients))
    fail(ErrorKind::Consistency, "stale linearization point: coefficients or context changed since linearize()");
}

}  // namespace

Eigen::VectorXcd shape_derivative(const ScatteringContext& ctx, const LinearizationPoint& point,
                                  const Eigen::VectorXd& direction) {
  check_fresh(ctx, point);
  const BlochSolver& solver = ctx.solver();
  const CellMesh& m = solver.space().mesh();
  if (direction.size() != ctx.basis().size()) fail(ErrorKind::Interface, "direction has the wrong length");
  if (direction.isZero(0.0)) return Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(ctx.setup().x1.size()));
  const Perturbation h = ctx.perturbation(direction);
  const auto chain = m.surface_chain();
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(m.node_count());
  for (std::size_t a = 1; a + 1 < chain.size(); ++a)
    d(chain[a]) = point.flux.values(a) * h.local_value(point.flux.x1[a]) / point.slope_factor[a];
  const Eigen::MatrixXcd loads = Eigen::MatrixXcd::Zero(solver.space().periodic_count(), solver.size());
  const BlochField w = solver.solve(loads, &point.coupling, &d, ctx.setup().cell);
  return ctx.measure(w, nullptr);
}

Eigen::MatrixXcd derivative_matrix(const ScatteringContext& ctx, const LinearizationPoint& point) {
  const int N = ctx.basis().size();
  Eigen::MatrixXcd D(static_cast<Eigen::Index>(ctx.setup().x1.size()), N);
  parallel_for(N, [&](int n) { D.col(n) = shape_derivative(ctx, point, Eigen::VectorXd::Unit(N, n)); });
  return D;
}

Eigen::MatrixXcd adjoint_loads(const ScatteringContext& ctx, const Eigen::VectorXcd& phi) {
  const auto& s = ctx.setup();
  const BlochSolver& solver = ctx.solver();
  const FemSpace& S = solver.space();
  const auto& grid = solver.grid();
  const DtnConfig& dtn = solver.dtn();
  const int M = grid.size(), T = dtn.truncation;
  const double L = S.period(), H = S.height();
  const double c = inverse_bloch_scale(grid);
  if (phi.size() != static_cast<Eigen::Index>(s.x1.size())) fail(ErrorKind::Interface, "phi has the wrong length");
  const auto& om = ctx.weights();
  Eigen::VectorXcd phi_line = phi;
  if (s.data_map.size() != 0) {
    // Re <R v, phi>_w = Re <v, W^-1 R^H W phi>_w
    Eigen::VectorXcd wphi(phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) wphi(i) = om[i] * phi(i);
    phi_line = s.data_map.adjoint() * wphi;
    for (Eigen::Index i = 0; i < phi.size(); ++i) phi_line(i) /= om[i];
  }
  const auto& xt = S.top_x();
  const auto wt = periodic_trapezoid_weights(xt, L);
  const int n = static_cast<int>(s.x1.size());
  const double dx = n > 1 ? s.x1[1] - s.x1[0] : 0.0;
  bool uniform = n > 1;
  for (int i = 2; i < n && uniform; ++i) uniform = std::abs(s.x1[i] - s.x1[i - 1] - dx) <= 1e-12 * dx;

  // G_l[a] = sum_i omega_i conj(phi_i) dData_i / dw_l[a].
  Eigen::MatrixXcd G(S.periodic_count(), M);
  G.setZero();
  parallel_for(M, [&](int l) {
    const double a = grid.alpha(l);
    for (int j = -T; j <= T; ++j) {
      const double xi = dtn.xi(j, a);
      const cplx step = std::exp(I * xi * dx);
      cplx e = std::exp(I * xi * s.x1[0]), v = 0.0;
      for (int i = 0; i < n; ++i) {
        if (i > 0) e = uniform ? e * step : std::exp(I * xi * s.x1[i]);
        v += om[i] * std::conj(phi_line(i)) * e;
      }
      v *= c * std::exp(I * dtn.beta(j, a) * (s.height - H)) / L;
      for (std::size_t q = 0; q < xt.size(); ++q) G(S.top_periodic()[q], l) += v * wt[q] * std::exp(-I * xi * xt[q]);
    }
  });
  Eigen::MatrixXcd loads(S.periodic_count(), M);
  const double scale = L * M / (2.0 * kPi);
  for (int l = 0; l < M; ++l) loads.col(l) = scale * G.col(grid.mirror(l));
  return loads;
}

AdjointState adjoint_state(const ScatteringContext& ctx, const LinearizationPoint& point,
                           const Eigen::VectorXcd& phi) {
  check_fresh(ctx, point);
  AdjointState st;
  st.z = ctx.solver().solve(adjoint_loads(ctx, phi), &point.coupling, nullptr, ctx.setup().cell);
  st.flux = ctx.solver().surface_flux(st.z, &point.coupling, ctx.setup().cell);
  return st;
}

Eigen::VectorXd adjoint_gradient(const ScatteringContext& ctx, const LinearizationPoint& point,
                                 const Eigen::VectorXcd& phi) {
  const int N = ctx.basis().size();
  if (phi.isZero(0.0)) return Eigen::VectorXd::Zero(N);
  const AdjointState st = adjoint_state(ctx, point, phi);
  const auto& xs = point.flux.x1;
  std::vector<double> m(xs.size());
  for (std::size_t a = 0; a < xs.size(); ++a)
    m[a] = -(point.flux.values(a) * st.flux.values(a)).real() / point.slope_factor[a];
  std::vector<double> gx, gw;
  gauss_legendre(4, gx, gw);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(N);
  for (std::size_t a = 0; a + 1 < xs.size(); ++a) {
    const double lo = xs[a], hi = xs[a + 1], half = 0.5 * (hi - lo);
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double x = lo + half * (gx[q] + 1.0);
      const double mv = p1_at(xs, m, x) * gw[q] * half;
      for (int k = 0; k < N; ++k) out(k) += mv * ctx.basis().value(k, x);
    }
  }
  return out;
}

CgneResult cgne_solve(const std::function<Eigen::VectorXcd(const Eigen::VectorXd&)>& apply,
                      const std::function<Eigen::VectorXd(const Eigen::VectorXcd&)>& adjoint,
                      const Eigen::VectorXcd& rhs, const std::function<double(const Eigen::VectorXcd&)>& norm2,
                      CgneOptions options) {
  CgneResult out;
  Eigen::VectorXd s = adjoint(rhs);
  out.step = Eigen::VectorXd::Zero(s.size());
  double gamma = s.squaredNorm();
  const double gamma0 = gamma;
  if (gamma0 == 0.0) return out;
  Eigen::VectorXcd r = rhs;
  Eigen::VectorXd p = s;
  while (out.iterations < options.max_iterations) {
    const Eigen::VectorXcd q = apply(p);
    const double qq = norm2(q);
    if (!(qq > 0.0)) break;
    const double a = gamma / qq;
    out.step += a * p;
    r -= a * q;
    s = adjoint(r);
    const double g = s.squaredNorm();
    ++out.iterations;
    out.reduction = std::sqrt(g / gamma0);
    if (out.reduction <= options.tolerance) break;
    p = s + (g / gamma) * p;
    gamma = g;
  }
  return out;
}

std::string stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Discrepancy:
      return "discrepancy";
    case StopReason::MaxIterations:
      return "max-iter";
    case StopReason::Stagnation:
      return "stagnation";
  }
  return "max-iter";
}

ReconstructionState newton_reconstruct(const ScatteringContext& ctx, const Eigen::VectorXcd& U,
                                       const NewtonOptions& options,
                                       const std::function<void(const ReconstructionState&)>& on_iterate) {
  const int N = ctx.basis().size();
  ReconstructionState st;
  st.coefficients = Eigen::VectorXd::Zero(N);
  if (options.initial.size() != 0) {
    if (options.initial.size() != N) fail(ErrorKind::Interface, "initial coefficients do not match the basis");
    st.coefficients = options.initial;
  }
  st.data_norm = ctx.norm(U);
  LinearizationPoint pt = linearize(ctx, st.coefficients);
  double res = ctx.norm(pt.data - U);
  st.residuals.push_back(res);
  st.iterates.push_back(st.coefficients);
  if (on_iterate) on_iterate(st);

  auto norm2 = [&](const Eigen::VectorXcd& v) { return ctx.inner(v, v); };
  for (int it = 0;; ++it) {
    if (res <= options.epsilon * st.data_norm) {
      st.stop = StopReason::Discrepancy;
      break;
    }
    if (it >= options.max_outer) {
      st.stop = StopReason::MaxIterations;
      break;
    }
    const Eigen::VectorXcd rhs = U - pt.data;
    CgneResult step;
    if (options.use_adjoint_state) {
      step = cgne_solve([&](const Eigen::VectorXd& h) { return shape_derivative(ctx, pt, h); },
                        [&](const Eigen::VectorXcd& phi) { return adjoint_gradient(ctx, pt, phi); }, rhs, norm2,
                        options.inner);
    } else {
      const Eigen::MatrixXcd D = derivative_matrix(ctx, pt);
      Eigen::VectorXcd w(D.rows());
      for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = ctx.weights()[i];
      step = cgne_solve([&](const Eigen::VectorXd& h) -> Eigen::VectorXcd { return D * h.cast<cplx>(); },
                        [&](const Eigen::VectorXcd& phi) -> Eigen::VectorXd {
                          return (D.adjoint() * w.cwiseProduct(phi)).real();
                        },
                        rhs, norm2, options.inner);
    }
    st.inner_iterations.push_back(step.iterations);
    if (step.step.norm() <= 1e-10) {
      st.stop = StopReason::Stagnation;
      break;
    }
    bool accepted = false;
    const double before = res;
    double t = 1.0;
    for (int halving = 0; halving <= options.max_halvings && !accepted; ++halving, t *= 0.5) {
      const Eigen::VectorXd trial = st.coefficients + t * step.step;
      try {
        const DiffeoField diffeo(ctx.setup().surface, ctx.perturbation(trial), ctx.setup().H);
        if (diffeo.min_determinant() < DiffeoField::kMinDeterminant) continue;
        LinearizationPoint cand = linearize(ctx, trial);
        const double r = ctx.norm(cand.data - U);
        if (r < res) {
          pt = std::move(cand);
          res = r;
          st.coefficients = trial;
          st.step_norms.push_back(t * step.step.norm());
          accepted = true;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InvalidPerturbation && e.kind() != ErrorKind::Geometry) throw;
      }
    }
    if (!accepted) {
      st.stop = StopReason::Stagnation;
      break;
    }
    st.residuals.push_back(res);
    st.iterates.push_back(st.coefficients);
    if (on_iterate) on_iterate(st);
    if (before - res < options.min_relative_decrease * before && res > options.epsilon * st.data_norm) {
      st.stop = StopReason::Stagnation;
      break;
    }
  }
  return st;
}

double perturbation_error(const Perturbation& p, const Perturbation& truth) {
  const double L = truth.period();
  const int lo = std::min(p.cell_index(), truth.cell_index()), hi = std::max(p.cell_index(), truth.cell_index());
  std::vector<double> gx, gw;
  gauss_legendre(8, gx, gw);
  double num = 0.0, den = 0.0;
  const int segs = 256;
  for (int J = lo; J <= hi; ++J)
    for (int s = 0; s < segs; ++s) {
      const double a = (J - 0.5) * L + L * s / segs, half = 0.5 * L / segs;
      for (std::size_t q = 0; q < gx.size(); ++q) {
        const double x = a + half * (gx[q] + 1.0);
        const double t = truth(x), d = p(x) - t;
        num += gw[q] * half * d * d;
        den += gw[q] * half * t * t;
      }
    }
  if (!(den > 0.0)) fail(ErrorKind::Domain, "reference perturbation vanishes");
  return std::sqrt(num / den);
}

}  // namespace perisurf
