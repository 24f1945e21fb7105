#include "perisurf/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "perisurf/errors.hpp"

namespace perisurf {

using nlohmann::json;

PeriodicSurface ScenarioConfig::make_surface() const {
  if (surface == "table") return PeriodicSurface(period, surface_mean, surface_cos, surface_sin);
  return PeriodicSurface::preset(surface);
}

Perturbation ScenarioConfig::make_perturbation() const {
  if (perturbation == "spline") {
    const auto basis = Perturbation::cell_basis(period, static_cast<int>(perturbation_coefficients.size()));
    return Perturbation::spline(
        basis, Eigen::Map<const Eigen::VectorXd>(perturbation_coefficients.data(), perturbation_coefficients.size()),
        perturbation_cell, period);
  }
  if (perturbation == "none") return Perturbation::zero(period, perturbation_cell);
  return Perturbation::preset(perturbation, period, perturbation_cell, literal_p3);
}

void ScenarioConfig::validate() const {
  std::vector<std::string> errs;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) errs.push_back(msg);
  };
  const bool preset = surface == "f1" || surface == "f2" || surface == "f3";
  need(preset || surface == "table", "surface: expected f1, f2, f3 or table");
  need(!preset || std::abs(period - 2.0 * kPi) < 1e-12, "period: surface presets have period 2*pi");
  need(perturbation == "p1" || perturbation == "p2" || perturbation == "p3" || perturbation == "spline" ||
           perturbation == "none",
       "perturbation: expected p1, p2, p3, spline or none");
  need(perturbation != "spline" || perturbation_coefficients.size() >= 1,
       "perturbation_coefficients: required for a spline perturbation");
  need(k > 0, "k: must be positive");
  need(period > 0, "period: must be positive");
  need(H > 0, "H: must be positive");
  need(measurement_height >= H, "measurement_height: must be at least H");
  need(window_b > window_a, "window: b must exceed a");
  need(asymmetric_window || std::abs(window_a + window_b) <= 1e-12 * std::abs(window_b),
       "window: must be symmetric about 0 unless asymmetric_window is set");
  need(spacing > 0, "spacing: must be positive");
  need(M >= 2 && M % 2 == 0, "M: must be even and at least 2");
  need(target_h > 0, "target_h: must be positive");
  need(target_h_inv > 0, "target_h_inv: must be positive");
  need(noise >= 0, "noise: must be nonnegative");
  need(J_max >= 0, "J_max: must be nonnegative");
  need(spline_count >= 1, "spline_count: must be positive");
  need(epsilon > 0, "epsilon: must be positive");
  need(inner_tolerance > 0, "inner_tolerance: must be positive");
  need(inner_max >= 1, "inner_max: must be positive");
  need(outer_max >= 0, "outer_max: must be nonnegative");
  if (errs.empty() && surface != "table") {
    try {
      need(H > make_surface().sup_height(), "H: must lie above the surface");
    } catch (const Error& e) {
      errs.push_back(e.what());
    }
  }
  if (!errs.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errs) msg += "\n  " + e;
    fail(ErrorKind::Config, msg);
  }
}

json ScenarioConfig::to_json() const {
  json j;
  j["surface"] = surface;
  if (surface == "table") {
    j["surface_mean"] = surface_mean;
    j["surface_cos"] = surface_cos;
    j["surface_sin"] = surface_sin;
  }
  j["perturbation"] = perturbation;
  if (perturbation == "spline") j["perturbation_coefficients"] = perturbation_coefficients;
  j["perturbation_cell"] = perturbation_cell;
  j["literal_p3"] = literal_p3;
  j["k"] = k;
  j["period"] = period;
  j["H"] = H;
  j["measurement_height"] = measurement_height;
  j["window"] = {window_a, window_b};
  j["asymmetric_window"] = asymmetric_window;
  j["spacing"] = spacing;
  j["M"] = M;
  j["target_h"] = target_h;
  j["target_h_inv"] = target_h_inv;
  j["noise"] = noise;
  j["complex_noise"] = complex_noise;
  j["seed"] = seed;
  j["J_max"] = J_max;
  j["spline_count"] = spline_count;
  j["epsilon"] = epsilon;
  j["inner_tolerance"] = inner_tolerance;
  j["inner_max"] = inner_max;
  j["outer_max"] = outer_max;
  if (!data_file.empty()) j["data_file"] = data_file;
  return j;
}

ScenarioConfig ScenarioConfig::from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::Config, "configuration must be a JSON object");
  ScenarioConfig c;
  std::vector<std::string> errs;
  std::map<std::string, std::function<void(const json&)>> fields;
  auto bind = [&](const char* key, auto& target) {
    fields[key] = [&target, key, &errs](const json& v) {
      try {
        target = v.get<std::decay_t<decltype(target)>>();
      } catch (const json::exception&) {
        errs.push_back(std::string(key) + ": wrong type (" + v.type_name() + ")");
      }
    };
  };
  bind("surface", c.surface);
  bind("surface_mean", c.surface_mean);
  bind("surface_cos", c.surface_cos);
  bind("surface_sin", c.surface_sin);
  bind("perturbation", c.perturbation);
  bind("perturbation_coefficients", c.perturbation_coefficients);
  bind("perturbation_cell", c.perturbation_cell);
  bind("literal_p3", c.literal_p3);
  bind("k", c.k);
  bind("period", c.period);
  bind("H", c.H);
  bind("measurement_height", c.measurement_height);
  bind("asymmetric_window", c.asymmetric_window);
  bind("spacing", c.spacing);
  bind("M", c.M);
  bind("target_h", c.target_h);
  bind("target_h_inv", c.target_h_inv);
  bind("noise", c.noise);
  bind("complex_noise", c.complex_noise);
  bind("seed", c.seed);
  bind("J_max", c.J_max);
  bind("spline_count", c.spline_count);
  bind("epsilon", c.epsilon);
  bind("inner_tolerance", c.inner_tolerance);
  bind("inner_max", c.inner_max);
  bind("outer_max", c.outer_max);
  bind("data_file", c.data_file);
  fields["window"] = [&](const json& v) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      errs.push_back("window: expected [a, b]");
      return;
    }
    c.window_a = v[0].get<double>();
    c.window_b = v[1].get<double>();
  };
  for (const auto& [key, value] : j.items()) {
    auto it = fields.find(key);
    if (it == fields.end())
      errs.push_back(key + ": unknown key");
    else
      it->second(value);
  }
  if (!errs.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errs) msg += "\n  " + e;
    fail(ErrorKind::Config, msg);
  }
  c.validate();
  return c;
}

ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrorKind::Config, "JSON parse error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                                ": " + e.what());
  }
  return ScenarioConfig::from_json(j);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::Config, "cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

void save_config(const std::string& path, const ScenarioConfig& config) {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::Io, "cannot write " + path);
  os << config.to_json().dump(2) << '\n';
}

}  // namespace perisurf
