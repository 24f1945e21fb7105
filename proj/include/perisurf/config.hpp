#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "perturbation.hpp"
#include "surface.hpp"

namespace perisurf {

/// Scenario parameters. Defaults are the desk-scale f1/p1 preset.
struct ScenarioConfig {
  // Surface: a preset name ("f1", "f2", "f3") or a trigonometric table.
  std::string surface = "f1";
  double surface_mean = 0.0;
  std::vector<double> surface_cos, surface_sin;

  // Perturbation: preset ("p1", "p2", "p3") or spline coefficients, planted in cell perturbation_cell.
  std::string perturbation = "p1";
  std::vector<double> perturbation_coefficients;
  int perturbation_cell = 0;
  bool literal_p3 = false;

  double k = 3.0;
  double period = 2.0 * kPi;
  double H = 4.0;
  double measurement_height = 4.0;  // > H means far data, reduced to H before inversion
  double window_a = -10.0 * kPi;
  double window_b = 10.0 * kPi;
  bool asymmetric_window = false;
  double spacing = kPi / 32.0;
  int M = 16;
  double target_h = 0.05;
  double target_h_inv = 0.1;
  double noise = 0.05;
  bool complex_noise = false;
  unsigned long long seed = 1;
  int J_max = 3;
  int spline_count = 10;
  double epsilon = 0.05;
  double inner_tolerance = 1e-2;
  int inner_max = 20;
  int outer_max = 15;
  std::string data_file;  // load measured data instead of simulating

  PeriodicSurface make_surface() const;
  /// Ground truth perturbation in cell perturbation_cell.
  Perturbation make_perturbation() const;
  bool far() const { return measurement_height > H; }

  /// Throws a config error listing every violated field.
  void validate() const;

  nlohmann::json to_json() const;
  /// Unknown keys and type errors are collected and reported together.
  static ScenarioConfig from_json(const nlohmann::json& j);

  bool operator==(const ScenarioConfig&) const = default;
};

ScenarioConfig load_config(const std::string& path);
/// Parses JSON text; syntax errors report line and column.
ScenarioConfig parse_config(const std::string& text);
void save_config(const std::string& path, const ScenarioConfig& config);

}  // namespace perisurf
