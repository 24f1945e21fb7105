#include "perisurf/bloch_transform.hpp"

#include <cmath>
#include <iostream>
#include <ostream>

#include "perisurf/surface.hpp"

namespace perisurf {

BlochField forward_bloch(const CellSamples& samples, const QuasiMomentumGrid& grid) {
  if (samples.cells() > grid.size())
    std::cerr << "perisurf: warning: " << samples.cells() << " cells exceed M = " << grid.size()
              << "; the transform aliases\n";
  const double L = grid.period();
  const double scale = std::sqrt(L / (2.0 * kPi));
  BlochField out{grid, Eigen::MatrixXcd::Zero(samples.values.rows(), grid.size())};
  for (int i = 0; i < grid.size(); ++i)
    for (int c = 0; c < samples.cells(); ++c) {
      const int j = samples.first_cell + c;
      out.values.col(i) += samples.values.col(c) * std::polar(scale, L * j * grid.alpha(i));
    }
  return out;
}

double inverse_bloch_scale(const QuasiMomentumGrid& grid) {
  return std::sqrt(grid.period() / (2.0 * kPi)) * grid.weight();
}

Eigen::VectorXcd inverse_bloch(const BlochField& field, int cell) {
  const double L = field.grid.period();
  const double scale = inverse_bloch_scale(field.grid);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(field.values.rows());
  for (int i = 0; i < field.grid.size(); ++i)
    out += field.values.col(i) * std::polar(scale, -L * cell * field.grid.alpha(i));
  return out;
}

void write_bloch_csv(std::ostream& os, const BlochField& field) {
  os << "alpha_index,node_index,re,im\n";
  os.precision(17);
  for (int i = 0; i < field.values.cols(); ++i)
    for (int n = 0; n < field.values.rows(); ++n)
      os << i << ',' << n << ',' << field.values(n, i).real() << ',' << field.values(n, i).imag() << '\n';
}

}  // namespace perisurf
