#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "indicator.hpp"
#include "inversion.hpp"
#include "json.hpp"
#include "measurement.hpp"

namespace perisurf {

std::vector<double> window_abscissas(const ScenarioConfig& cfg);

/// Scattered data of the perturbed surface at the measurement height, with the
/// real noise factor (1 + noise c), c uniform on [-1, 1], drawn from the seed.
MeasuredData simulate_data(const ScenarioConfig& cfg);

/// Linear far-to-near map on uniform abscissas: the window is treated as one
/// period, its Fourier modes with |xi| <= k are kept and moved from
/// from_height to to_height by exp(i beta (to - from)); the rest are dropped.
Eigen::MatrixXcd far_to_near_operator(const std::vector<double>& x1, double k, double from_height,
                                      double to_height);

/// Reduces far data to the line x2 = H (tag far-reduced).
MeasuredData far_to_near(const MeasuredData& far, const ScenarioConfig& cfg);

/// Inversion-resolution forward setup matching the data: near data is modelled
/// on x2 = H; far data at its height followed by the same reduction.
ForwardSetup inversion_setup(const ScenarioConfig& cfg, int cell, const MeasuredData& original);

struct LocatorResult {
  int cell = 0;
  bool ambiguous = false;
  std::vector<int> candidates;
  std::string message;
  IndicatorField field;
};

/// Algorithm: w = U - U0 on the data line, indicator over the sampling grid, argmax cell.
LocatorResult locate_perturbation(const ScenarioConfig& cfg, const ScatteringContext& ctx, const MeasuredData& data);

struct PipelineOptions {
  std::optional<int> force_cell;
  std::string out_dir;          // artifacts are written when non-empty
  bool reconstruct = true;
  bool locate = true;
};

/// Full run; returns the JSON report (schema 1). Timings live under "timings".
nlohmann::json run_pipeline(const ScenarioConfig& cfg, const PipelineOptions& options);

/// Report without the "timings" member, for reproducibility comparisons.
nlohmann::json strip_timings(nlohmann::json report);

}  // namespace perisurf
