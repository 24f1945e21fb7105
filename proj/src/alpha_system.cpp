#include "perisurf/alpha_system.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "perisurf/errors.hpp"

namespace perisurf {

namespace {

struct P1Element {
  double area;
  std::array<Eigen::Vector2d, 3> grad;
};

P1Element p1_element(const CellMesh& m, const std::array<int, 3>& t) {
  const auto &a = m.nodes[t[0]], &b = m.nodes[t[1]], &c = m.nodes[t[2]];
  const double twice = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
  P1Element e;
  e.area = 0.5 * std::abs(twice);
  const std::array<Eigen::Vector2d, 3> p{a, b, c};
  for (int i = 0; i < 3; ++i) {
    const auto& pj = p[(i + 1) % 3];
    const auto& pk = p[(i + 2) % 3];
    e.grad[i] = Eigen::Vector2d(pj.y() - pk.y(), pk.x() - pj.x()) / twice;
  }
  return e;
}

// int_0^1 exp(-i t s) ds and int_0^1 s exp(-i t s) ds.
std::pair<cplx, cplx> segment_moments(double t) {
  if (std::abs(t) < 1e-2) {
    cplx i0 = 0.0, i1 = 0.0, pw = 1.0;
    double fact = 1.0;
    for (int n = 0; n < 12; ++n) {
      if (n > 0) fact *= n;
      i0 += pw / (fact * (n + 1));
      i1 += pw / (fact * (n + 2));
      pw *= cplx(0.0, -t);
    }
    return {i0, i1};
  }
  const cplx a(0.0, -t);
  const cplx ea = std::exp(a);
  return {(ea - 1.0) / a, ea / a - (ea - 1.0) / (a * a)};
}

}  // namespace

FemSpace::FemSpace(CellMesh mesh, double k) : mesh_(std::move(mesh)), k_(k) {
  const int n = mesh_.node_count();
  per_of_node_.assign(n, -1);
  for (int v = 0; v < n; ++v)
    if (mesh_.partner[v] < 0) {
      per_of_node_[v] = n_per_++;
      node_of_per_.push_back(v);
    }
  for (int v = 0; v < n; ++v)
    if (mesh_.partner[v] >= 0) per_of_node_[v] = per_of_node_[mesh_.partner[v]];
  free_of_per_.assign(n_per_, -1);
  for (int p = 0; p < n_per_; ++p)
    if (!mesh_.is(node_of_per_[p], CellMesh::kSurface)) {
      free_of_per_[p] = static_cast<int>(free_nodes_.size());
      free_nodes_.push_back(p);
    }
  for (int v : mesh_.surface_chain())
    if (mesh_.partner[v] < 0) surface_.push_back(per_of_node_[v]);
  for (int v : mesh_.top_chain())
    if (mesh_.partner[v] < 0) {
      top_.push_back(per_of_node_[v]);
      top_x_.push_back(mesh_.nodes[v].x());
    }

  std::vector<Eigen::Triplet<double>> kt, mt;
  for (const auto& t : mesh_.triangles) {
    const auto e = p1_element(mesh_, t);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        kt.emplace_back(t[b], t[a], e.area * e.grad[a].dot(e.grad[b]));
        mt.emplace_back(t[b], t[a], e.area / 12.0 * (a == b ? 2.0 : 1.0));
      }
  }
  K_.resize(n, n);
  K_.setFromTriplets(kt.begin(), kt.end());
  Mass_.resize(n, n);
  Mass_.setFromTriplets(mt.begin(), mt.end());
}

cplx FemSpace::phase(int node, double alpha) const {
  return mesh_.partner[node] >= 0 ? std::exp(cplx(0.0, -alpha * mesh_.period)) : cplx(1.0);
}

Eigen::VectorXcd FemSpace::expand(const Eigen::VectorXcd& periodic, double alpha) const {
  Eigen::VectorXcd full(mesh_.node_count());
  for (int v = 0; v < mesh_.node_count(); ++v) full(v) = phase(v, alpha) * periodic(per_of_node_[v]);
  return full;
}

Eigen::VectorXcd FemSpace::collapse(const Eigen::VectorXcd& full, double alpha) const {
  Eigen::VectorXcd per = Eigen::VectorXcd::Zero(n_per_);
  for (int v = 0; v < mesh_.node_count(); ++v) per(per_of_node_[v]) += std::conj(phase(v, alpha)) * full(v);
  return per;
}

AlphaSystem::AlphaSystem(std::shared_ptr<const FemSpace> space, double alpha, const DtnConfig& dtn)
    : space_(std::move(space)), alpha_(alpha), dtn_(dtn) {
  dtn_.check_anomaly(alpha_);
  const FemSpace& S = *space_;
  const CellMesh& m = S.mesh();
  const double k2 = S.k() * S.k();
  const int np = S.periodic_count();

  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(m.triangles.size() * 9);
  for (const auto& t : m.triangles) {
    const auto e = p1_element(m, t);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double val = e.area * e.grad[a].dot(e.grad[b]) - k2 * e.area / 12.0 * (a == b ? 2.0 : 1.0);
        trip.emplace_back(S.periodic_index(t[b]), S.periodic_index(t[a]),
                          val * S.phase(t[a], alpha_) * std::conj(S.phase(t[b], alpha_)));
      }
  }

  // Galerkin projections of the top hat functions onto the retained modes.
  const auto& top_per = S.top_periodic();
  std::vector<int> slot(np, -1);
  for (std::size_t q = 0; q < top_per.size(); ++q) slot[top_per[q]] = static_cast<int>(q);
  F_ = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(top_per.size()), dtn_.modes());
  const auto chain = m.top_chain();
  for (std::size_t s = 0; s + 1 < chain.size(); ++s) {
    const int na = chain[s], nb = chain[s + 1];
    const double xa = m.nodes[na].x(), len = m.nodes[nb].x() - xa;
    const int qa = slot[S.periodic_index(na)], qb = slot[S.periodic_index(nb)];
    const cplx pa = S.phase(na, alpha_), pb = S.phase(nb, alpha_);
    for (int j = -dtn_.truncation; j <= dtn_.truncation; ++j) {
      const double xi = dtn_.xi(j, alpha_);
      const auto [i0, i1] = segment_moments(xi * len);
      const cplx base = std::exp(cplx(0.0, -xi * xa)) * len / dtn_.period;
      F_(qa, j + dtn_.truncation) += pa * base * (i0 - i1);
      F_(qb, j + dtn_.truncation) += pb * base * i1;
    }
  }
  const Eigen::MatrixXcd D = dtn_block();
  for (std::size_t b = 0; b < top_per.size(); ++b)
    for (std::size_t a = 0; a < top_per.size(); ++a) trip.emplace_back(top_per[b], top_per[a], -D(b, a));

  A_.resize(np, np);
  A_.setFromTriplets(trip.begin(), trip.end());

  std::vector<Eigen::Triplet<cplx>> ft;
  for (int col = 0; col < A_.outerSize(); ++col)
    for (SpMatC::InnerIterator it(A_, col); it; ++it) {
      const int fr = S.free_index(static_cast<int>(it.row())), fc = S.free_index(col);
      if (fr >= 0 && fc >= 0) ft.emplace_back(fr, fc, it.value());
    }
  Aff_.resize(S.free_count(), S.free_count());
  Aff_.setFromTriplets(ft.begin(), ft.end());
  Aff_.makeCompressed();
  lu_ = std::make_unique<Eigen::SparseLU<SpMatC>>();
  lu_->compute(Aff_);
  if (lu_->info() != Eigen::Success) {
    std::ostringstream os;
    os << "factorization failed at alpha = " << alpha_ << ": " << lu_->lastErrorMessage();
    fail(ErrorKind::Solver, os.str());
  }
}

Eigen::MatrixXcd AlphaSystem::dtn_block() const {
  // (T u, v) on the discrete space: i L sum_j beta_j F(a,j) conj(F(b,j)).
  Eigen::VectorXcd ib(dtn_.modes());
  for (int j = -dtn_.truncation; j <= dtn_.truncation; ++j)
    ib(j + dtn_.truncation) = cplx(0.0, dtn_.period) * dtn_.beta(j, alpha_);
  return F_.conjugate() * ib.asDiagonal() * F_.transpose();
}

Eigen::VectorXcd AlphaSystem::solve_free(const Eigen::VectorXcd& rhs) const {
  Eigen::VectorXcd x = lu_->solve(rhs);
  if (lu_->info() != Eigen::Success || !x.allFinite()) {
    std::ostringstream os;
    os << "linear solve failed at alpha = " << alpha_;
    fail(ErrorKind::Solver, os.str());
  }
  return x;
}

Eigen::VectorXcd AlphaSystem::solve(const Eigen::VectorXcd& load, const Eigen::VectorXcd& lifting) const {
  const FemSpace& S = *space_;
  const Eigen::VectorXcd r = load - A_ * lifting;
  Eigen::VectorXcd rf(S.free_count());
  for (int f = 0; f < S.free_count(); ++f) rf(f) = r(S.free_periodic()[f]);
  const Eigen::VectorXcd c = solve_free(rf);
  Eigen::VectorXcd u = lifting;
  for (int f = 0; f < S.free_count(); ++f) u(S.free_periodic()[f]) += c(f);
  return u;
}

Eigen::VectorXcd AlphaSystem::mode_load(const Eigen::VectorXcd& mode_coeffs) const {
  const Eigen::VectorXcd top = dtn_.period * (F_.conjugate() * mode_coeffs);
  Eigen::VectorXcd load = Eigen::VectorXcd::Zero(space_->periodic_count());
  for (std::size_t q = 0; q < space_->top_periodic().size(); ++q) load(space_->top_periodic()[q]) += top(q);
  return load;
}

Eigen::VectorXcd AlphaSystem::incident_load(const IncidentModes& incident) const {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(dtn_.modes());
  const double H = space_->height();
  for (std::size_t q = 0; q < incident.m.size(); ++q) {
    const int j = incident.m[q];
    if (std::abs(j) > dtn_.truncation) fail(ErrorKind::Config, "incident mode outside the DtN truncation");
    const double beta = incident.beta(static_cast<int>(q));
    c(j + dtn_.truncation) += incident.amp[q] * cplx(0.0, -2.0 * beta) * std::exp(cplx(0.0, -beta * H));
  }
  return mode_load(c);
}

Eigen::VectorXcd solve_quasi_periodic_dirichlet(const AlphaSystem& sys, const Eigen::VectorXcd& surface_data,
                                                const Eigen::VectorXcd& load) {
  const FemSpace& S = sys.space();
  if (surface_data.size() != static_cast<Eigen::Index>(S.surface_periodic().size()))
    fail(ErrorKind::Interface, "surface data size does not match the surface dofs");
  Eigen::VectorXcd lifting = Eigen::VectorXcd::Zero(S.periodic_count());
  for (std::size_t s = 0; s < S.surface_periodic().size(); ++s) lifting(S.surface_periodic()[s]) = surface_data(s);
  return sys.solve(load, lifting);
}

}  // namespace perisurf
