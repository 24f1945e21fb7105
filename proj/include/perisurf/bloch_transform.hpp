#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <vector>

#include "quasi_momentum.hpp"

namespace perisurf {

using cplx = std::complex<double>;

/// Field samples on consecutive cells first_cell, first_cell+1, ...; every
/// column holds the same set of cell-local nodes.
struct CellSamples {
  int first_cell = 0;
  Eigen::MatrixXcd values;  // nodes x cells

  int cells() const { return static_cast<int>(values.cols()); }
};

/// Quasimomentum-indexed field w(alpha_i, node); column i belongs to alpha_i.
struct BlochField {
  QuasiMomentumGrid grid;
  Eigen::MatrixXcd values;  // nodes x M

  int nodes() const { return static_cast<int>(values.rows()); }
};

/// (J phi)(alpha_i, x) = sqrt(L/2pi) sum_j phi(x + j L e1) e^{i L j alpha_i}.
/// Emits a warning on stderr if the samples span more than M cells.
BlochField forward_bloch(const CellSamples& samples, const QuasiMomentumGrid& grid);

/// (J^-1 w)(x + j L e1) = sqrt(L/2pi) (L*/M) sum_i w(alpha_i, x) e^{-i alpha_i L j}.
Eigen::VectorXcd inverse_bloch(const BlochField& field, int cell);

/// Scale sqrt(L/2pi) L*/M of the inverse transform.
double inverse_bloch_scale(const QuasiMomentumGrid& grid);

/// Debug dump: alpha_index,node_index,re,im.
void write_bloch_csv(std::ostream& os, const BlochField& field);

}  // namespace perisurf
