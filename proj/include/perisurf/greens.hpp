#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bloch_solver.hpp"
#include "dtn.hpp"
#include "surface.hpp"

namespace perisurf {

/// Source point strictly between the surface and the line x2 = H.
struct SourcePoint {
  Eigen::Vector2d y;
  double standoff = 0.0;  // min vertical distance to the surface and to x2 = H
};

/// Throws a domain error unless y lies strictly inside with standoff >= min_standoff.
SourcePoint make_source(const Eigen::Vector2d& y, const PeriodicSurface& surface, double H,
                        double min_standoff = 1e-3);

/// (i/(2L)) sum_j (1/beta_j) exp(i xi_j (x1-y1) + i beta_j |x2-y2|), xi_j = L* j - alpha.
/// truncation <= 0 sums until the evanescent tail drops below 1e-16.
/// Throws a domain error when |x2 - y2| < 1e-3 (the series stalls).
cplx quasiperiodic_free_green(double alpha, const Eigen::Vector2d& x, const Eigen::Vector2d& y, double k,
                              double period, int truncation = 0);

/// Mode truncation for which exp(-|beta| d) stays below 1e-17 past it.
int free_green_truncation(double k, double period, double d);

/// Fourier samples phi(xi) of a field on the line x2 = height:
/// field(x1) = sum phi(xi_n) exp(i xi_n x1) dxi with dxi = L*/M.
struct SpectralDensity {
  double dxi = 0.0;
  std::vector<double> xi;
  std::vector<cplx> beta;
  Eigen::VectorXcd phi;
};

/// G(., y) = Phi_M(., y) + G^s(., y) for the unperturbed surface of the solver.
/// Phi_M is the free-space function summed against the discrete quasimomentum
/// grid, so that G vanishes on the surface nodes exactly. The evaluation keeps
/// a reference to the solver.
class GreensEvaluation {
 public:
  GreensEvaluation(const BlochSolver& solver, SourcePoint source, BlochField scattered,
                   std::vector<RayleighCoefficients> scattered_modes, std::vector<RayleighCoefficients> modes);

  const SourcePoint& source() const { return source_; }
  double wavenumber() const { return solver_->dtn().k; }
  const BlochField& scattered_field() const { return scattered_; }
  const std::vector<RayleighCoefficients>& scattered_modes() const { return scattered_modes_; }
  /// Rayleigh coefficients at H of the full G(., y) per alpha node.
  const std::vector<RayleighCoefficients>& modes() const { return modes_; }

  cplx free_part(const Eigen::Vector2d& x) const;
  cplx scattered_part(const Eigen::Vector2d& x) const;
  cplx value(const Eigen::Vector2d& x) const { return free_part(x) + scattered_part(x); }
  /// Unperiodized Phi(x, y) for comparison.
  cplx plain_free_part(const Eigen::Vector2d& x) const;

  /// G(x1, height; y) for height >= H.
  Eigen::VectorXcd trace(const std::vector<double>& x1, double height) const;
  SpectralDensity spectral_density(double height) const;

 private:
  const BlochSolver* solver_;
  SourcePoint source_;
  BlochField scattered_;
  std::vector<RayleighCoefficients> scattered_modes_, modes_;
};

/// Solves the per-alpha problems with Dirichlet data -sqrt(L/2pi) G_qp(alpha, ., y).
GreensEvaluation periodic_domain_green(const BlochSolver& solver, const SourcePoint& source);

struct ImaginaryIdentity {
  double lhs = 0.0;   // Im G(x_p, x_q)
  cplx rhs;           // 2 pi int_{-k}^{k} beta phi_p conj(phi_q) dxi
  double scale = 0.0;  // max(|lhs|, sqrt(Im G(p,p) Im G(q,q)))
  double mismatch = 0.0;
};

/// Im G(x_p, x_q) against the propagating spectral integral of the traces on
/// x2 = height; gp, gq are evaluations with sources x_p, x_q.
ImaginaryIdentity imaginary_part_identity_check(const GreensEvaluation& gp, const GreensEvaluation& gq,
                                                double height);

/// I(x_p, x_q) = 2 pi int phi_p conj(phi_q) dxi, over all modes or over |xi| <= k only.
cplx spectral_overlap(const GreensEvaluation& gp, const GreensEvaluation& gq, double height,
                      bool propagating_only);

}  // namespace perisurf
