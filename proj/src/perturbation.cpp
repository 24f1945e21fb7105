#include "perisurf/perturbation.hpp"

#include <cmath>

#include "perisurf/errors.hpp"
#include "perisurf/surface.hpp"

namespace perisurf {

Perturbation Perturbation::zero(double period, int cell_index) {
  Perturbation p;
  p.kind_ = Kind::Zero;
  p.cell_ = cell_index;
  p.period_ = period;
  return p;
}

Perturbation Perturbation::preset(const std::string& name, double period, int cell_index,
                                  bool literal_p3) {
  if (name != "p1" && name != "p2" && name != "p3")
    fail(ErrorKind::Config, "unknown perturbation preset '" + name + "'");
  Perturbation p;
  p.kind_ = Kind::Preset;
  p.name_ = name;
  p.literal_p3_ = literal_p3;
  p.cell_ = cell_index;
  p.period_ = period;
  return p;
}

SplineBasis Perturbation::cell_basis(double period, int count) {
  return SplineBasis(-0.5 * period, 0.5 * period, count);
}

Perturbation Perturbation::spline(const SplineBasis& basis, Eigen::VectorXd coefficients,
                                  int cell_index, double period) {
  if (coefficients.size() != basis.size())
    fail(ErrorKind::Config, "coefficient count does not match spline basis");
  Perturbation p;
  p.kind_ = Kind::Spline;
  p.basis_ = basis;
  p.coeffs_ = std::move(coefficients);
  p.cell_ = cell_index;
  p.period_ = period;
  return p;
}

bool Perturbation::is_zero() const {
  if (kind_ == Kind::Zero) return true;
  if (kind_ == Kind::Spline) return coeffs_.size() == 0 || coeffs_.cwiseAbs().maxCoeff() == 0.0;
  return false;
}

Perturbation Perturbation::shifted_to(int cell_index) const {
  Perturbation p = *this;
  p.cell_ = cell_index;
  return p;
}

Perturbation Perturbation::with_coefficients(Eigen::VectorXd coeffs) const {
  if (!basis_) fail(ErrorKind::Config, "with_coefficients needs a spline perturbation");
  return spline(*basis_, std::move(coeffs), cell_, period_);
}

double Perturbation::local_value(double s) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Spline: {
      double v = 0.0;
      for (int n = 0; n < basis_->size(); ++n)
        if (coeffs_(n) != 0.0) v += coeffs_(n) * basis_->value(n, s);
      return v;
    }
    case Kind::Preset:
      if (name_ == "p1" || name_ == "p2") {
        if (s <= -kPi || s >= kPi) return 0.0;
        const double v = 0.25 + 0.25 * std::cos(s);
        return name_ == "p1" ? -v : v;
      }
      if (s <= -3.0 || s >= 3.0) return 0.0;
      {
        const double a = s - 3.0;
        const double b = literal_p3_ ? s - 3.0 : s + 3.0;
        return 5e-4 * a * a * a * b * b * b * std::sin(kPi * (s + 3.0) / 3.0);
      }
  }
  return 0.0;
}

double Perturbation::local_derivative(double s) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Spline: {
      double v = 0.0;
      for (int n = 0; n < basis_->size(); ++n)
        if (coeffs_(n) != 0.0) v += coeffs_(n) * basis_->derivative(n, s);
      return v;
    }
    case Kind::Preset:
      if (name_ == "p1" || name_ == "p2") {
        if (s <= -kPi || s >= kPi) return 0.0;
        const double d = -0.25 * std::sin(s);
        return name_ == "p1" ? -d : d;
      }
      if (s <= -3.0 || s >= 3.0) return 0.0;
      {
        const double a = s - 3.0;
        const double b = literal_p3_ ? s - 3.0 : s + 3.0;
        const double w = kPi / 3.0;
        const double sn = std::sin(w * (s + 3.0)), cs = std::cos(w * (s + 3.0));
        const double poly = a * a * a * b * b * b;
        const double dpoly = 3.0 * a * a * b * b * b + 3.0 * a * a * a * b * b;
        return 5e-4 * (dpoly * sn + poly * w * cs);
      }
  }
  return 0.0;
}

double Perturbation::local_second_derivative(double s) const {
  if (kind_ == Kind::Spline) {
    double v = 0.0;
    for (int n = 0; n < basis_->size(); ++n) v += coeffs_(n) * basis_->second_derivative(n, s);
    return v;
  }
  const double h = 1e-4;
  return (local_derivative(s + h) - local_derivative(s - h)) / (2.0 * h);
}

double Perturbation::operator()(double x1) const {
  const double s = x1 - cell_ * period_;
  if (s <= -0.5 * period_ || s > 0.5 * period_) return 0.0;
  return local_value(s);
}

double Perturbation::derivative(double x1) const {
  const double s = x1 - cell_ * period_;
  if (s <= -0.5 * period_ || s > 0.5 * period_) return 0.0;
  return local_derivative(s);
}

nlohmann::json Perturbation::to_json() const {
  nlohmann::json j;
  j["cell_index"] = cell_;
  switch (kind_) {
    case Kind::Zero:
      j["knots"] = nlohmann::json::array();
      j["coefficients"] = nlohmann::json::array();
      break;
    case Kind::Preset:
      j["preset"] = name_;
      if (literal_p3_) j["literal_p3"] = true;
      break;
    case Kind::Spline:
      j["knots"] = basis_->knots();
      j["coefficients"] = std::vector<double>(coeffs_.data(), coeffs_.data() + coeffs_.size());
      break;
  }
  return j;
}

Perturbation Perturbation::from_json(const nlohmann::json& j, double period) {
  if (!j.is_object()) fail(ErrorKind::Config, "perturbation must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    if (k != "cell_index" && k != "knots" && k != "coefficients" && k != "preset" && k != "literal_p3")
      fail(ErrorKind::Config, "perturbation: unknown key '" + k + "'");
  }
  const int cell = j.value("cell_index", 0);
  if (j.contains("preset"))
    return preset(j.at("preset").get<std::string>(), period, cell, j.value("literal_p3", false));
  const auto coeffs = j.value("coefficients", std::vector<double>{});
  if (coeffs.empty()) return zero(period, cell);
  const auto knots = j.value("knots", std::vector<double>{});
  const int n = static_cast<int>(coeffs.size());
  SplineBasis basis = cell_basis(period, n);
  if (!knots.empty()) {
    if (static_cast<int>(knots.size()) != n + 4)
      fail(ErrorKind::Config, "perturbation: knots must have coefficients+4 entries");
    basis = SplineBasis(knots.front(), knots.back(), n);
    const auto expect = basis.knots();
    for (int i = 0; i < n + 4; ++i)
      if (std::abs(expect[i] - knots[i]) > 1e-9 * (1.0 + std::abs(knots[i])))
        fail(ErrorKind::Config, "perturbation: only uniform knot vectors are supported");
  }
  Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), n);
  return spline(basis, c, cell, period);
}

}  // namespace perisurf
