#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "perisurf/errors.hpp"
#include "perisurf/parallel.hpp"
#include "perisurf/pipeline.hpp"

using namespace perisurf;
using nlohmann::json;

namespace {

struct Flags {
  std::string config;
  std::optional<unsigned long long> seed;
  std::optional<int> force_cell;
  std::optional<double> noise;
  std::string out;
};

ScenarioConfig scenario(const Flags& f) {
  ScenarioConfig c = f.config.empty() ? ScenarioConfig{} : load_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (f.noise) c.noise = *f.noise;
  c.validate();
  return c;
}

int finish(const json& report) {
  std::cout << report.dump(2) << '\n';
  if (report.contains("locator") && report["locator"].value("ambiguous", false)) {
    std::cerr << "ambiguous locator: " << report["locator"].value("message", std::string()) << '\n';
    return exit_code(ErrorKind::AmbiguousLocator);
  }
  return 0;
}

int cmd_simulate(const Flags& f) {
  const ScenarioConfig c = scenario(f);
  const MeasuredData d = simulate_data(c);
  const std::string dir = f.out.empty() ? "." : f.out;
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / "data.csv").string();
  write_measured_csv(path, d);
  std::cout << json{{"data", path}, {"tag", tag_name(d.tag)}, {"height", d.height}, {"samples", d.x1.size()},
                    {"noise", d.noise}, {"seed", d.seed}}
                   .dump(2)
            << '\n';
  return 0;
}

int cmd_pipeline(const Flags& f, bool locate, bool reconstruct) {
  const ScenarioConfig c = scenario(f);
  PipelineOptions o;
  o.out_dir = f.out;
  o.force_cell = f.force_cell;
  o.locate = locate;
  o.reconstruct = reconstruct;
  if (!locate && !o.force_cell) o.force_cell = 0;
  return finish(run_pipeline(c, o));
}

// Coarse end-to-end smoke run: data, locator and two Newton steps.
int cmd_selftest(const Flags& f) {
  ScenarioConfig c = f.config.empty() ? ScenarioConfig{} : load_config(f.config);
  c.target_h = 0.2;
  c.target_h_inv = 0.2;
  c.M = 8;
  c.window_a = -2 * kPi;
  c.window_b = 2 * kPi;
  c.spacing = kPi / 8;
  c.J_max = 1;
  c.noise = 0.0;
  c.outer_max = 2;
  PipelineOptions o;
  o.out_dir = f.out;
  const json a = run_pipeline(c, o);
  const json b = run_pipeline(c, PipelineOptions{});
  const bool located = a["locator"].value("cell", -99) == c.perturbation_cell;
  const auto& res = a["reconstruction"]["residuals"];
  const bool decreasing = res.size() >= 2 && res.back().get<double>() < res.front().get<double>();
  const bool repeatable = strip_timings(a) == strip_timings(b);
  std::cout << "threads " << thread_count() << '\n';
  std::cout << (located ? "PASS" : "FAIL") << " locator cell " << a["locator"].value("cell", -99) << '\n';
  std::cout << (decreasing ? "PASS" : "FAIL") << " newton residual " << res.front() << " -> " << res.back() << '\n';
  std::cout << (repeatable ? "PASS" : "FAIL") << " repeatable report\n";
  return located && decreasing && repeatable ? 0 : exit_code(ErrorKind::Solver);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally perturbed periodic surface: simulation, localization and shape reconstruction"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "scenario JSON file")->check(CLI::ExistingFile);
  app.add_option("--seed", f.seed, "noise seed");
  app.add_option("--force-cell", f.force_cell, "skip the locator and reconstruct in cell J");
  app.add_option("--noise", f.noise, "relative noise level")->check(CLI::NonNegativeNumber);
  app.add_option("--out", f.out, "artifact directory");

  auto* sim = app.add_subcommand("simulate", "synthesize measured data (writes data.csv)")->fallthrough();
  auto* loc = app.add_subcommand("locate", "locate the perturbed cell")->fallthrough();
  auto* rec = app.add_subcommand("reconstruct", "reconstruct p in a given cell (default 0)")->fallthrough();
  auto* pipe = app.add_subcommand("pipeline", "locate and reconstruct")->fallthrough();
  auto* self = app.add_subcommand("selftest", "coarse end-to-end check")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(ErrorKind::Config);
  }

  try {
    if (*sim) return cmd_simulate(f);
    if (*loc) return cmd_pipeline(f, true, false);
    if (*rec) return cmd_pipeline(f, false, true);
    if (*pipe) return cmd_pipeline(f, true, true);
    if (*self) return cmd_selftest(f);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(ErrorKind::Solver);
  }
  return 0;
}
