#include "perisurf/indicator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>

#include "perisurf/errors.hpp"
#include "perisurf/parallel.hpp"

namespace perisurf {

SamplingGrid sampling_grid(const PeriodicSurface& surface, double H, int J_max, int nx, int ny, double margin) {
  if (J_max < 0 || nx < 1 || ny < 1) fail(ErrorKind::Config, "invalid sampling grid");
  const double L = surface.period();
  const double lo = surface.sup_height() + margin, hi = H - margin;
  if (!(hi > lo)) fail(ErrorKind::Config, "sampling band between surface and artificial boundary is empty");
  SamplingGrid g;
  for (int J = -J_max; J <= J_max; ++J)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const double x2 = ny == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * j / (ny - 1);
        g.points.emplace_back(J * L - 0.5 * L + L * (i + 0.5) / nx, x2);
        g.cells.push_back(J);
      }
  return g;
}

double indicator_value(const std::vector<double>& x_data, const Eigen::VectorXcd& w,
                       const std::vector<double>& x_green, const Eigen::VectorXcd& g) {
  if (x_data != x_green || w.size() != g.size() || static_cast<Eigen::Index>(x_data.size()) != w.size())
    fail(ErrorKind::Interface, "indicator: data and Green traces sampled on different abscissas");
  const auto om = trapezoid_weights(x_data);
  cplx s = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) s += om[i] * w(i) * std::conj(g(i));
  return std::abs(s);
}

IndicatorField compute_indicator(const BlochSolver& solver, const PeriodicSurface& surface, const MeasuredData& w,
                                 const SamplingGrid& grid) {
  w.validate();
  const auto& qg = solver.grid();
  const DtnConfig& dtn = solver.dtn();
  const double L = surface.period(), H = solver.space().height();
  if (w.height < H) fail(ErrorKind::Domain, "indicator data must lie on or above the artificial boundary");
  const int M = qg.size();
  const double c = inverse_bloch_scale(qg);

  // Reference-cell sources and their cell shifts.
  std::map<std::pair<double, double>, int> index;
  std::vector<Eigen::Vector2d> sources;
  std::vector<int> slot(grid.points.size());
  for (std::size_t q = 0; q < grid.points.size(); ++q) {
    const Eigen::Vector2d y(grid.points[q].x() - grid.cells[q] * L, grid.points[q].y());
    auto [it, fresh] = index.emplace(std::make_pair(y.x(), y.y()), static_cast<int>(sources.size()));
    if (fresh) sources.push_back(y);
    slot[q] = it->second;
  }
  std::vector<std::unique_ptr<GreensEvaluation>> evals(sources.size());
  parallel_for(static_cast<int>(sources.size()), [&](int s) {
    evals[s] = std::make_unique<GreensEvaluation>(periodic_domain_green(solver, make_source(sources[s], surface, H)));
  });

  // W_lj = sum_i omega_i w_i exp(-i xi_lj x_i), shared by all sources.
  int T = 0;
  for (const auto& e : evals)
    for (const auto& r : e->modes()) T = std::max(T, r.truncation);
  const auto om = trapezoid_weights(w.x1);
  const int n = static_cast<int>(w.x1.size());
  const double dx = n > 1 ? w.x1[1] - w.x1[0] : 0.0;
  bool uniform = n > 1;
  for (int i = 2; i < n && uniform; ++i) uniform = std::abs(w.x1[i] - w.x1[i - 1] - dx) <= 1e-12 * dx;
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(2 * T + 1, M);
  parallel_for(M, [&](int l) {
    for (int j = -T; j <= T && n > 0; ++j) {
      const double xi = dtn.xi(j, qg.alpha(l));
      const cplx step = std::exp(cplx(0.0, -xi * dx));
      cplx e = std::exp(cplx(0.0, -xi * w.x1[0]));
      cplx s = 0.0;
      for (int i = 0; i < n; ++i) {
        if (i > 0) e = uniform ? e * step : std::exp(cplx(0.0, -xi * w.x1[i]));
        s += om[i] * w.values(i) * e;
      }
      W(j + T, l) = s;
    }
  });

  IndicatorField out;
  out.points = grid.points;
  out.cells = grid.cells;
  out.values.resize(grid.points.size());
  for (std::size_t q = 0; q < grid.points.size(); ++q) {
    const auto& modes = evals[slot[q]]->modes();
    cplx s = 0.0;
    for (int l = 0; l < M; ++l) {
      const auto& r = modes[l];
      cplx part = 0.0;
      for (int j = -r.truncation; j <= r.truncation; ++j) {
        const cplx t = r(j) * std::exp(cplx(0.0, 1.0) * dtn.beta(j, r.alpha) * (w.height - H));
        part += W(j + T, l) * std::conj(t);
      }
      s += part * std::exp(cplx(0.0, -qg.alpha(l) * L * grid.cells[q]));
    }
    out.values[q] = std::abs(c * s);
  }
  return out;
}

int locate_cell(const IndicatorField& field) {
  if (field.values.empty()) fail(ErrorKind::Interface, "empty indicator field");
  std::map<int, double> best;
  for (std::size_t q = 0; q < field.values.size(); ++q) {
    if (!std::isfinite(field.values[q]) || field.values[q] < 0.0)
      fail(ErrorKind::Consistency, "indicator values must be finite and nonnegative");
    auto [it, fresh] = best.emplace(field.cells[q], field.values[q]);
    if (!fresh) it->second = std::max(it->second, field.values[q]);
  }
  double top = 0.0;
  for (const auto& [cell, v] : best) top = std::max(top, v);
  std::vector<int> tied;
  for (const auto& [cell, v] : best)
    if (v >= top * (1.0 - 1e-12)) tied.push_back(cell);
  if (tied.size() > 1) {
    std::string list;
    for (int c : tied) list += (list.empty() ? "" : ", ") + std::to_string(c);
    fail(ErrorKind::AmbiguousLocator, "indicator maximum tied across cells " + list);
  }
  return tied.front();
}

void write_indicator_csv(std::ostream& os, const IndicatorField& field) {
  os << std::setprecision(17) << "x1,x2,value\n";
  for (std::size_t q = 0; q < field.values.size(); ++q)
    os << field.points[q].x() << ',' << field.points[q].y() << ',' << field.values[q] << '\n';
}

}  // namespace perisurf
