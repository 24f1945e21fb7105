#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "perisurf/errors.hpp"
#include "perisurf/pipeline.hpp"

using namespace perisurf;
using nlohmann::json;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Consistency;
}

template <class F>
std::string message_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

// Small and fast scenario for plumbing tests.
ScenarioConfig coarse() {
  ScenarioConfig c;
  c.target_h = 0.2;
  c.target_h_inv = 0.2;
  c.M = 8;
  c.window_a = -2 * kPi;
  c.window_b = 2 * kPi;
  c.spacing = kPi / 8;
  c.J_max = 1;
  return c;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("perisurf_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config defaults are the desk scenario") {
  const ScenarioConfig c;
  CHECK(c.surface == "f1");
  CHECK(c.perturbation == "p1");
  CHECK(c.k == 3.0);
  CHECK(c.H == 4.0);
  CHECK(c.M == 16);
  CHECK(c.target_h == 0.05);
  CHECK(c.target_h_inv == 0.1);
  CHECK(c.noise == 0.05);
  CHECK(c.spline_count == 10);
  CHECK(window_abscissas(c).size() == 641);
  CHECK_NOTHROW(c.validate());
  CHECK(ScenarioConfig::from_json(json::object()) == c);
}

TEST_CASE("config json round trip") {
  ScenarioConfig c;
  c.surface = "f3";
  c.perturbation = "spline";
  c.perturbation_coefficients = {0.1, -0.2, 0.3};
  c.perturbation_cell = -2;
  c.noise = 0.01;
  c.seed = 77;
  c.window_a = -3.5;
  c.window_b = 7.25;
  c.asymmetric_window = true;
  c.complex_noise = true;
  CHECK(ScenarioConfig::from_json(c.to_json()) == c);
  CHECK(parse_config(c.to_json().dump()) == c);

  const auto dir = temp_dir("config");
  save_config((dir / "c.json").string(), c);
  CHECK(load_config((dir / "c.json").string()) == c);
}

TEST_CASE("config errors are reported field by field") {
  const std::string unknown = message_of([] { parse_config(R"({"kk": 3, "noise": "high"})"); });
  CHECK(unknown.find("kk") != std::string::npos);
  CHECK(unknown.find("noise") != std::string::npos);
  CHECK(kind_of([] { parse_config(R"({"kk": 3})"); }) == ErrorKind::Config);

  ScenarioConfig c;
  c.k = -1;
  c.M = 7;
  c.surface = "f9";
  const std::string msg = message_of([&] { c.validate(); });
  CHECK(msg.find("k:") != std::string::npos);
  CHECK(msg.find("M:") != std::string::npos);
  CHECK(msg.find("surface:") != std::string::npos);

  ScenarioConfig low;
  low.measurement_height = 3.0;
  CHECK(kind_of([&] { low.validate(); }) == ErrorKind::Config);
}

TEST_CASE("config parse errors carry line and column") {
  const std::string msg = message_of([] { parse_config("{\n  \"k\": 3,\n  \"H\": ]\n}"); });
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);
  CHECK(kind_of([] { load_config("/nonexistent/perisurf.json"); }) == ErrorKind::Config);
}

TEST_CASE("measured data csv round trip is exact") {
  MeasuredData d;
  d.height = 4.0;
  d.x1 = {-1.0, 0.1, 1.0 / 3.0};
  d.values.resize(3);
  d.values << cplx(1.0 / 7.0, -2e-17), cplx(3.14159265358979, 1e300), cplx(-0.0, 2.5);
  d.noise = 0.05;
  d.seed = 12345678901234ull;
  d.tag = MeasuredData::Tag::FarReduced;
  std::stringstream ss;
  write_measured_csv(ss, d);
  const MeasuredData r = read_measured_csv(ss);
  CHECK(r.height == d.height);
  CHECK(r.x1 == d.x1);
  CHECK(r.values == d.values);
  CHECK(r.noise == d.noise);
  CHECK(r.seed == d.seed);
  CHECK(r.tag == d.tag);

  const std::string missing = "/nonexistent/data.csv";
  CHECK(kind_of([&] { read_measured_csv(missing); }) == ErrorKind::Io);
  CHECK(message_of([&] { read_measured_csv(missing); }).find(missing) != std::string::npos);
}

TEST_CASE("simulated noise is bounded and seeded") {
  ScenarioConfig c = coarse();
  c.noise = 0.0;
  const MeasuredData clean = simulate_data(c);
  c.noise = 0.05;
  const MeasuredData noisy = simulate_data(c);
  const MeasuredData again = simulate_data(c);
  CHECK(noisy.values == again.values);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < clean.values.size(); ++i) {
    const cplx r = noisy.values(i) / clean.values(i) - 1.0;
    CHECK(std::abs(r.imag()) <= 1e-12);
    worst = std::max(worst, std::abs(r));
  }
  CHECK(worst <= 0.05 + 1e-12);
  CHECK(worst >= 0.04);
  c.seed = 2;
  CHECK(simulate_data(c).values != noisy.values);
}

TEST_CASE("far-to-near reduction") {
  const double k = 3.0, H = 4.0, h = 100.0;
  const auto x = uniform_abscissas(-10 * kPi, 10 * kPi, kPi / 32);
  const double W = 20 * kPi;
  auto mode = [&](double xi, double x2) {
    Eigen::VectorXcd v(x.size());
    const cplx b = std::sqrt(cplx(k * k - xi * xi, 0.0));
    for (std::size_t i = 0; i < x.size(); ++i) v(i) = std::exp(cplx(0, 1) * (xi * x[i] + b * x2));
    return v;
  };
  const Eigen::MatrixXcd R = far_to_near_operator(x, k, h, H);

  // Window-periodic propagating field: exact transport between the lines.
  Eigen::VectorXcd far = Eigen::VectorXcd::Zero(x.size()), near = far;
  for (int j : {-29, -4, 0, 7, 25}) {
    const double xi = 2 * kPi * j / W;
    far += mode(xi, h);
    near += mode(xi, H);
  }
  CHECK((R * far - near).norm() <= 1e-8 * near.norm());

  // Evanescent content is removed.
  const Eigen::VectorXcd ev = mode(2 * kPi * 40 / W, 0.0);
  CHECK((R * ev).norm() <= 1e-12 * ev.norm());

  ScenarioConfig c;
  MeasuredData d;
  d.x1 = x;
  d.values = far;
  d.height = h;
  d.tag = MeasuredData::Tag::Far;
  const MeasuredData red = far_to_near(d, c);
  CHECK(red.tag == MeasuredData::Tag::FarReduced);
  CHECK(red.height == H);
  d.height = H;
  CHECK(kind_of([&] { far_to_near(d, c); }) == ErrorKind::Domain);
}

TEST_CASE("forced cell skips the locator") {
  ScenarioConfig c = coarse();
  c.noise = 0.0;
  PipelineOptions o;
  o.reconstruct = false;
  o.force_cell = 1;
  const json r = run_pipeline(c, o);
  CHECK(r["locator"]["forced"] == true);
  CHECK(r["locator"]["cell"] == 1);
  CHECK(!r["locator"].contains("max_by_cell"));

  o.force_cell = 5;
  CHECK(kind_of([&] { run_pipeline(c, o); }) == ErrorKind::Config);
}

TEST_CASE("pipeline writes its artifacts and is reproducible") {
  ScenarioConfig c = coarse();
  c.noise = 0.01;
  c.outer_max = 2;
  const auto dir = temp_dir("pipeline");
  PipelineOptions o;
  o.out_dir = dir.string();
  const json a = run_pipeline(c, o);
  for (const char* f : {"data.csv", "indicator.csv", "reconstruction.csv", "final_p.csv", "report.json"})
    CHECK(std::filesystem::exists(dir / f));
  CHECK(a["locator"]["cell"] == 0);
  CHECK(a["reconstruction"]["iterations"].get<int>() <= 2);
  std::ifstream is(dir / "report.json");
  CHECK(strip_timings(json::parse(is)) == strip_timings(a));
  const json b = run_pipeline(c, PipelineOptions{});
  CHECK(strip_timings(b) == strip_timings(a));
}
