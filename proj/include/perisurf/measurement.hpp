#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "bloch_solver.hpp"
#include "dtn.hpp"
#include "herglotz.hpp"

namespace perisurf {

/// Field samples on a horizontal line x2 = height.
struct MeasuredData {
  enum class Tag { Near, Far, FarReduced };

  double height = 0.0;
  std::vector<double> x1;
  Eigen::VectorXcd values;
  double noise = 0.0;
  unsigned long long seed = 0;
  Tag tag = Tag::Near;

  /// Throws an interface error unless abscissas increase strictly and values are finite.
  void validate() const;
};

std::string tag_name(MeasuredData::Tag tag);
MeasuredData::Tag parse_tag(const std::string& name);

/// "# key=value" metadata lines, then header x1,re,im and rows at 17 significant digits.
void write_measured_csv(std::ostream& os, const MeasuredData& data);
MeasuredData read_measured_csv(std::istream& is);
void write_measured_csv(const std::string& path, const MeasuredData& data);
MeasuredData read_measured_csv(const std::string& path);

/// Top-trace Rayleigh coefficients of every alpha column; with an incident
/// density its modes are removed, leaving the scattered part.
std::vector<RayleighCoefficients> rayleigh_family(const BlochSolver& solver, const BlochField& field,
                                                  const HerglotzDensity* incident = nullptr);

/// Physical field sum_l c sum_j w_lj exp(i xi_lj x1 + i beta_lj (x2 - H)) on a
/// line x2 = height >= H; c is the inverse-transform scale of the grid.
Eigen::VectorXcd synthesize_physical(const QuasiMomentumGrid& grid, const DtnConfig& dtn,
                                     const std::vector<RayleighCoefficients>& modes, const std::vector<double>& x1,
                                     double height);

/// Uniform abscissas a, a + dx, ..., up to b (inclusive within dx/2).
std::vector<double> uniform_abscissas(double a, double b, double dx);

/// Trapezoid weights of sorted abscissas (open segment ends get half weights).
std::vector<double> trapezoid_weights(const std::vector<double>& x);

}  // namespace perisurf
