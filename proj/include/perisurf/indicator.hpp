#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "bloch_solver.hpp"
#include "greens.hpp"
#include "measurement.hpp"
#include "surface.hpp"

namespace perisurf {

/// Sampling points nx x ny per cell for cells -J_max..J_max, heights spanning
/// (sup zeta + margin, H - margin).
struct SamplingGrid {
  std::vector<Eigen::Vector2d> points;
  std::vector<int> cells;
};

SamplingGrid sampling_grid(const PeriodicSurface& surface, double H, int J_max, int nx = 8, int ny = 4,
                           double margin = 0.2);

struct IndicatorField {
  std::vector<Eigen::Vector2d> points;
  std::vector<int> cells;
  std::vector<double> values;
};

/// |sum_i w_i conj(G_i) omega_i| with trapezoid weights on the shared abscissas.
double indicator_value(const std::vector<double>& x_data, const Eigen::VectorXcd& w,
                       const std::vector<double>& x_green, const Eigen::VectorXcd& g);

/// Indicator over the sampling grid for data w = U - U0 on a line x2 = w.height.
/// Sources of the reference cell are solved once; other cells follow from the
/// shift G(x, y + J L e1) = G(x - J L e1, y).
IndicatorField compute_indicator(const BlochSolver& solver, const PeriodicSurface& surface,
                                 const MeasuredData& w, const SamplingGrid& grid);

/// Cell holding the global maximum; an ambiguous-locator error names all cells
/// whose maximum lies within 1e-12 (relative) of it.
int locate_cell(const IndicatorField& field);

/// x1,x2,value with a header row.
void write_indicator_csv(std::ostream& os, const IndicatorField& field);

}  // namespace perisurf
