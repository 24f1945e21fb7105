#include "perisurf/measurement.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "perisurf/errors.hpp"

namespace perisurf {

void MeasuredData::validate() const {
  if (static_cast<Eigen::Index>(x1.size()) != values.size())
    fail(ErrorKind::Interface, "measured data: abscissa and value counts differ");
  for (std::size_t i = 1; i < x1.size(); ++i)
    if (!(x1[i] > x1[i - 1])) fail(ErrorKind::Interface, "measured data: abscissas must increase strictly");
  if (!values.allFinite()) fail(ErrorKind::Interface, "measured data: non-finite sample");
}

std::string tag_name(MeasuredData::Tag tag) {
  switch (tag) {
    case MeasuredData::Tag::Near:
      return "near";
    case MeasuredData::Tag::Far:
      return "far";
    case MeasuredData::Tag::FarReduced:
      return "far-reduced";
  }
  return "near";
}

MeasuredData::Tag parse_tag(const std::string& name) {
  if (name == "near") return MeasuredData::Tag::Near;
  if (name == "far") return MeasuredData::Tag::Far;
  if (name == "far-reduced") return MeasuredData::Tag::FarReduced;
  fail(ErrorKind::Io, "unknown data tag '" + name + "'");
}

void write_measured_csv(std::ostream& os, const MeasuredData& data) {
  os << std::setprecision(17);
  os << "# height=" << data.height << "\n# noise=" << data.noise << "\n# seed=" << data.seed
     << "\n# tag=" << tag_name(data.tag) << "\n";
  os << "x1,re,im\n";
  for (std::size_t i = 0; i < data.x1.size(); ++i)
    os << data.x1[i] << ',' << data.values(i).real() << ',' << data.values(i).imag() << '\n';
}

MeasuredData read_measured_csv(std::istream& is) {
  MeasuredData d;
  std::string line;
  bool header = false;
  std::vector<cplx> vals;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      const std::string val = line.substr(eq + 1);
      try {
        if (key == "height") d.height = std::stod(val);
        else if (key == "noise") d.noise = std::stod(val);
        else if (key == "seed") d.seed = std::stoull(val);
        else if (key == "tag") d.tag = parse_tag(val);
      } catch (const std::logic_error&) {
        fail(ErrorKind::Io, "measured data line " + std::to_string(lineno) + ": bad value for " + key);
      }
      continue;
    }
    if (!header) {
      if (line.rfind("x1,re,im", 0) != 0) fail(ErrorKind::Io, "measured data: expected header x1,re,im");
      header = true;
      continue;
    }
    std::istringstream ls(line);
    double x, re, im;
    char c1, c2;
    if (!(ls >> x >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',')
      fail(ErrorKind::Io, "measured data line " + std::to_string(lineno) + ": expected x1,re,im");
    d.x1.push_back(x);
    vals.emplace_back(re, im);
  }
  if (!header) fail(ErrorKind::Io, "measured data: missing header");
  d.values = Eigen::Map<Eigen::VectorXcd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  d.validate();
  return d;
}

void write_measured_csv(const std::string& path, const MeasuredData& data) {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::Io, "cannot write " + path);
  write_measured_csv(os, data);
}

MeasuredData read_measured_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::Io, "cannot open data file " + path);
  return read_measured_csv(is);
}

std::vector<RayleighCoefficients> rayleigh_family(const BlochSolver& solver, const BlochField& field,
                                                  const HerglotzDensity* incident) {
  const FemSpace& S = solver.space();
  const double H = S.height();
  std::vector<RayleighCoefficients> out;
  out.reserve(solver.size());
  Eigen::VectorXcd trace(S.top_periodic().size());
  for (int l = 0; l < solver.size(); ++l) {
    const double a = solver.grid().alpha(l);
    for (std::size_t q = 0; q < S.top_periodic().size(); ++q) trace(q) = field.values(S.top_periodic()[q], l);
    auto r = rayleigh_coefficients(trace, S.top_x(), a, solver.dtn(), H);
    if (incident) {
      const auto inc = bloch_of_herglotz(*incident, solver.dtn().k, S.period(), a);
      for (std::size_t q = 0; q < inc.m.size(); ++q) {
        const int j = inc.m[q];
        if (std::abs(j) > r.truncation) fail(ErrorKind::Domain, "incident mode beyond the DtN truncation");
        r.values(j + r.truncation) -= inc.amp[q] * std::exp(cplx(0.0, -inc.beta(static_cast<int>(q)) * H));
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

Eigen::VectorXcd synthesize_physical(const QuasiMomentumGrid& grid, const DtnConfig& dtn,
                                     const std::vector<RayleighCoefficients>& modes, const std::vector<double>& x1,
                                     double height) {
  const int n = static_cast<int>(x1.size());
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  if (n == 0) return out;
  const double c = inverse_bloch_scale(grid);
  bool uniform = n > 2;
  const double dx = n > 1 ? x1[1] - x1[0] : 0.0;
  for (int q = 2; q < n && uniform; ++q) uniform = std::abs(x1[q] - x1[q - 1] - dx) <= 1e-12 * std::abs(dx);
  for (std::size_t l = 0; l < modes.size(); ++l) {
    const auto& r = modes[l];
    if (height < r.height) fail(ErrorKind::Domain, "synthesis below the artificial boundary");
    for (int j = -r.truncation; j <= r.truncation; ++j) {
      if (r(j) == 0.0) continue;
      const double xi = dtn.xi(j, r.alpha);
      const cplx amp = c * r(j) * std::exp(cplx(0.0, 1.0) * dtn.beta(j, r.alpha) * (height - r.height));
      if (std::abs(amp) < 1e-300) continue;
      if (uniform) {
        cplx e = amp * std::exp(cplx(0.0, xi * x1[0]));
        const cplx step = std::exp(cplx(0.0, xi * dx));
        for (int q = 0; q < n; ++q) {
          out(q) += e;
          e *= step;
        }
      } else {
        for (int q = 0; q < n; ++q) out(q) += amp * std::exp(cplx(0.0, xi * x1[q]));
      }
    }
  }
  return out;
}

std::vector<double> uniform_abscissas(double a, double b, double dx) {
  if (!(dx > 0.0) || !(b >= a)) fail(ErrorKind::Config, "invalid measurement window or spacing");
  const int n = static_cast<int>(std::floor((b - a) / dx + 0.5)) + 1;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = a + i * dx;
  return x;
}

std::vector<double> trapezoid_weights(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = x[i + 1] - x[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

}  // namespace perisurf
