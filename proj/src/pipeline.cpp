#include "perisurf/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>

#include "perisurf/errors.hpp"

namespace perisurf {

using nlohmann::json;

namespace {

const cplx I(0.0, 1.0);

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::ofstream os(std::filesystem::path(dir) / name);
  if (!os) fail(ErrorKind::Io, "cannot write " + (std::filesystem::path(dir) / name).string());
  os << std::setprecision(17);
  return os;
}

}  // namespace

std::vector<double> window_abscissas(const ScenarioConfig& cfg) {
  return uniform_abscissas(cfg.window_a, cfg.window_b, cfg.spacing);
}

MeasuredData simulate_data(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto surface = cfg.make_surface();
  auto space = std::make_shared<FemSpace>(build_cell_mesh(surface, cfg.H, cfg.target_h), cfg.k);
  const BlochSolver solver(space, QuasiMomentumGrid(cfg.M, cfg.period, cfg.k), DtnConfig::standard(cfg.k, cfg.period));
  const auto incident = HerglotzDensity::standard();
  const DiffeoField diffeo(surface, cfg.make_perturbation(), cfg.H);
  const BlochField w = solver.solve_perturbed(incident, diffeo);

  MeasuredData d;
  d.height = cfg.measurement_height;
  d.x1 = window_abscissas(cfg);
  d.values = synthesize_physical(solver.grid(), solver.dtn(), rayleigh_family(solver, w, &incident), d.x1, d.height);
  d.noise = cfg.noise;
  d.seed = cfg.seed;
  d.tag = cfg.far() ? MeasuredData::Tag::Far : MeasuredData::Tag::Near;
  if (cfg.noise > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Eigen::Index i = 0; i < d.values.size(); ++i) {
      if (cfg.complex_noise) {
        const double re = u(rng), im = u(rng);
        d.values(i) *= 1.0 + cfg.noise * cplx(re, im) / std::sqrt(2.0);
      } else {
        d.values(i) *= 1.0 + cfg.noise * u(rng);
      }
    }
  }
  return d;
}

Eigen::MatrixXcd far_to_near_operator(const std::vector<double>& x1, double k, double from_height,
                                      double to_height) {
  const int n = static_cast<int>(x1.size());
  if (n < 3) fail(ErrorKind::Config, "far-to-near reduction needs at least three samples");
  const double dx = x1[1] - x1[0];
  for (int i = 2; i < n; ++i)
    if (std::abs(x1[i] - x1[i - 1] - dx) > 1e-9 * dx)
      fail(ErrorKind::Config, "far-to-near reduction needs uniform abscissas");
  // Samples 0..n-2 form one period W; the closing sample shares the phase of the first.
  const int np = n - 1;
  const double W = np * dx;
  const int jmax = static_cast<int>(std::floor(k * W / (2.0 * kPi)));
  Eigen::MatrixXcd E(np, 2 * jmax + 1);
  Eigen::VectorXcd f(2 * jmax + 1);
  for (int j = -jmax; j <= jmax; ++j) {
    const double xi = 2.0 * kPi * j / W;
    f(j + jmax) = std::exp(I * std::sqrt(std::max(k * k - xi * xi, 0.0)) * (to_height - from_height));
    for (int p = 0; p < np; ++p) E(p, j + jmax) = std::exp(I * xi * (x1[p] - x1[0]));
  }
  const Eigen::MatrixXcd core = E * f.asDiagonal() * E.adjoint() / static_cast<double>(np);
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(n, n);
  R.topLeftCorner(np, np) = core;
  // Input: the two end samples are averaged into sample 0; output: the last row repeats the first.
  R.block(0, 0, np, 1) *= 0.5;
  R.block(0, n - 1, np, 1) = R.block(0, 0, np, 1);
  R.row(n - 1) = R.row(0);
  return R;
}

MeasuredData far_to_near(const MeasuredData& far, const ScenarioConfig& cfg) {
  if (!(far.height > cfg.H)) fail(ErrorKind::Domain, "far-to-near reduction needs data above x2 = H");
  MeasuredData out = far;
  out.values = far_to_near_operator(far.x1, cfg.k, far.height, cfg.H) * far.values;
  out.height = cfg.H;
  out.tag = MeasuredData::Tag::FarReduced;
  return out;
}

ForwardSetup inversion_setup(const ScenarioConfig& cfg, int cell, const MeasuredData& original) {
  ForwardSetup s;
  s.surface = cfg.make_surface();
  s.k = cfg.k;
  s.H = cfg.H;
  s.mesh_h = cfg.target_h_inv;
  s.M = cfg.M;
  s.x1 = original.x1;
  s.cell = cell;
  s.spline_count = cfg.spline_count;
  switch (original.tag) {
    case MeasuredData::Tag::Near:
      s.height = original.height;
      break;
    case MeasuredData::Tag::Far:
      s.height = original.height;
      s.data_map = far_to_near_operator(original.x1, cfg.k, original.height, cfg.H);
      break;
    case MeasuredData::Tag::FarReduced:
      s.height = cfg.H;
      s.data_map = far_to_near_operator(original.x1, cfg.k, cfg.H, cfg.H);
      break;
  }
  return s;
}

LocatorResult locate_perturbation(const ScenarioConfig& cfg, const ScatteringContext& ctx, const MeasuredData& data) {
  MeasuredData w = data;
  if (w.x1 != ctx.setup().x1) fail(ErrorKind::Interface, "data and model abscissas differ");
  w.values = data.values - ctx.unperturbed_data();
  // The model trace lives on the reduced line when a data map is present.
  w.height = ctx.setup().data_map.size() != 0 ? cfg.H : ctx.setup().height;
  LocatorResult r;
  r.field = compute_indicator(ctx.solver(), ctx.setup().surface, w, sampling_grid(ctx.setup().surface, cfg.H, cfg.J_max));
  try {
    r.cell = locate_cell(r.field);
    r.candidates = {r.cell};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::AmbiguousLocator) throw;
    r.ambiguous = true;
    r.message = e.what();
    std::map<int, double> best;
    for (std::size_t q = 0; q < r.field.values.size(); ++q)
      best[r.field.cells[q]] = std::max(best[r.field.cells[q]], r.field.values[q]);
    double top = 0.0;
    for (const auto& [c, v] : best) top = std::max(top, v);
    for (const auto& [c, v] : best)
      if (v >= top * (1.0 - 1e-12)) r.candidates.push_back(c);
  }
  return r;
}

json strip_timings(json report) {
  report.erase("timings");
  return report;
}

json run_pipeline(const ScenarioConfig& cfg, const PipelineOptions& options) {
  cfg.validate();
  if (options.force_cell && std::abs(*options.force_cell) > cfg.J_max)
    fail(ErrorKind::Config, "forced cell lies outside -J_max..J_max");
  const auto t_start = std::chrono::steady_clock::now();
  json report;
  report["schema"] = 1;
  report["config"] = cfg.to_json();
  json timings;
  const bool write = !options.out_dir.empty();
  if (write) std::filesystem::create_directories(options.out_dir);

  // (1) data
  auto t0 = std::chrono::steady_clock::now();
  const bool simulated = cfg.data_file.empty();
  const MeasuredData original = simulated ? simulate_data(cfg) : read_measured_csv(cfg.data_file);
  original.validate();
  timings["data"] = seconds_since(t0);
  // (2) far data is reduced to x2 = H
  const MeasuredData data = original.tag == MeasuredData::Tag::Far ? far_to_near(original, cfg) : original;
  report["data"] = {{"source", simulated ? "simulated" : cfg.data_file},
                    {"tag", tag_name(original.tag)},
                    {"height", original.height},
                    {"samples", original.x1.size()},
                    {"noise", original.noise},
                    {"seed", original.seed},
                    {"inversion_tag", tag_name(data.tag)}};
  if (write) {
    write_measured_csv((std::filesystem::path(options.out_dir) / "data.csv").string(), original);
    if (data.tag != original.tag)
      write_measured_csv((std::filesystem::path(options.out_dir) / "data_reduced.csv").string(), data);
  }

  // (3)-(4) locator on the reference context
  t0 = std::chrono::steady_clock::now();
  auto ctx = std::make_unique<ScatteringContext>(inversion_setup(cfg, 0, original));
  timings["unperturbed_solve"] = seconds_since(t0);
  json loc;
  int cell = 0;
  bool proceed = true;
  if (options.force_cell) {
    cell = *options.force_cell;
    loc["forced"] = true;
    loc["cell"] = cell;
  } else if (options.locate) {
    t0 = std::chrono::steady_clock::now();
    const LocatorResult lr = locate_perturbation(cfg, *ctx, data);
    timings["locator"] = seconds_since(t0);
    loc["forced"] = false;
    loc["ambiguous"] = lr.ambiguous;
    loc["candidates"] = lr.candidates;
    std::map<int, double> best;
    for (std::size_t q = 0; q < lr.field.values.size(); ++q)
      best[lr.field.cells[q]] = std::max(best[lr.field.cells[q]], lr.field.values[q]);
    json per_cell = json::object();
    for (const auto& [c, v] : best) per_cell[std::to_string(c)] = v;
    loc["max_by_cell"] = per_cell;
    if (write) {
      auto os = open_out(options.out_dir, "indicator.csv");
      write_indicator_csv(os, lr.field);
    }
    if (lr.ambiguous) {
      loc["message"] = lr.message;
      proceed = false;
    } else {
      cell = lr.cell;
      loc["cell"] = cell;
    }
  }
  report["locator"] = loc;

  // (5)-(6) reconstruction in cell J
  if (proceed && options.reconstruct) {
    if (cell != 0) {
      t0 = std::chrono::steady_clock::now();
      ctx = std::make_unique<ScatteringContext>(inversion_setup(cfg, cell, original));
      timings["unperturbed_solve_cell"] = seconds_since(t0);
    }
    NewtonOptions no;
    no.epsilon = cfg.epsilon;
    no.max_outer = cfg.outer_max;
    no.inner = CgneOptions{cfg.inner_tolerance, cfg.inner_max};
    t0 = std::chrono::steady_clock::now();
    const ReconstructionState st = newton_reconstruct(*ctx, data.values, no);
    timings["reconstruction"] = seconds_since(t0);

    json rec;
    rec["cell"] = cell;
    rec["iterations"] = static_cast<int>(st.residuals.size()) - 1;
    rec["residuals"] = st.residuals;
    std::vector<double> rel;
    for (double r : st.residuals) rel.push_back(r / st.data_norm);
    rec["relative_residuals"] = rel;
    rec["step_norms"] = st.step_norms;
    rec["inner_iterations"] = st.inner_iterations;
    rec["stop_reason"] = stop_reason_name(st.stop);
    rec["final_coefficients"] = std::vector<double>(st.coefficients.data(), st.coefficients.data() + st.coefficients.size());
    const Perturbation recon = ctx->perturbation(st.coefficients);
    std::optional<Perturbation> truth;
    if (simulated) truth = cfg.make_perturbation();
    if (truth && !truth->is_zero()) {
      rec["error_vs_truth"] = perturbation_error(recon, *truth);
      std::vector<double> errs;
      for (const auto& C : st.iterates) errs.push_back(perturbation_error(ctx->perturbation(C), *truth));
      rec["error_history"] = errs;
    }
    report["reconstruction"] = rec;

    if (write) {
      const double L = cfg.period;
      const int ns = 201;
      auto os = open_out(options.out_dir, "reconstruction.csv");
      os << "x1";
      for (std::size_t i = 0; i < st.iterates.size(); ++i) os << ",iter" << i;
      os << '\n';
      auto fin = open_out(options.out_dir, "final_p.csv");
      fin << "x1,p" << (truth ? ",truth" : "") << '\n';
      for (int q = 0; q < ns; ++q) {
        const double x = (cell - 0.5) * L + L * q / (ns - 1);
        os << x;
        for (const auto& C : st.iterates) os << ',' << ctx->perturbation(C)(x);
        os << '\n';
        fin << x << ',' << recon(x);
        if (truth) fin << ',' << (*truth)(x);
        fin << '\n';
      }
    }
  }
  timings["total"] = seconds_since(t_start);
  report["timings"] = timings;
  if (write) {
    auto os = open_out(options.out_dir, "report.json");
    os << report.dump(2) << '\n';
  }
  return report;
}

}  // namespace perisurf
