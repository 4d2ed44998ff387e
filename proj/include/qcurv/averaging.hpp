#pragma once

// Spherical symmetrization of axisymmetric conformal factors w(r, theta),
// theta the polar angle from a fixed axis.

#include <functional>
#include <string>
#include <vector>

#include "qcurv/core.hpp"
#include "qcurv/quadrature.hpp"

namespace qcurv {

struct SphericalField {
  Dim dim;
  std::string id;
  std::vector<double> r;   // strictly increasing, r[0] >= 0
  PolarRule rule;          // Gegenbauer-Gauss nodes and normalized weights
  std::vector<double> w;   // w[i * rule.x.size() + j] = w(r_i, theta_j)
  bool axisymmetric = true;

  std::size_t angular_count() const { return rule.x.size(); }
  double at(std::size_t i, std::size_t j) const { return w[i * angular_count() + j]; }

  /// Samples fn(r, theta) on the grid with `angular_nodes` polar nodes.
  static SphericalField from_function(const Dim& dim, std::string id, std::vector<double> r, int angular_nodes,
                                      const std::function<double(double, double)>& fn);
  /// The radial profile p repeated over every polar node.
  static SphericalField from_profile(const RadialProfile& p, std::string id, std::vector<double> r,
                                     int angular_nodes);

  /// Throws DomainError on malformed grids or weights.
  void validate() const;
};

/// base(r) + eps cos^power(theta) eta(r), power 1 or 2, with eta = r^power
/// e^{-r^2/4}, or r^power times a bump supported in r < 3 when `compact`.
SphericalField perturbed_field(const RadialProfile& base, double eps, int power, bool compact,
                               std::vector<double> r, int angular_nodes);

/// w-bar(r_i) = polar average of w(r_i, .), interpolated as a sampled profile.
RadialProfile spherical_symmetrize(const SphericalField& field);

struct ShellDefect {
  double max_defect = 0.0;        // max_r |int_{|x|=r} Delta^m w-bar - int_{|x|=r} Delta^m w|
  std::vector<double> r;          // radii where both shell integrals were formed
  std::vector<double> shell_field;
  std::vector<double> shell_mean;
};

/// Forms both shell integrals independently: Delta^m w pointwise from the
/// Gegenbauer mode expansion, then polar quadrature; Delta^m w-bar from the
/// symmetrized profile. Throws ResolutionError when the highest resolved
/// modes carry more than kModeTailTolerance of the field.
ShellDefect verify_shell_equality(const SphericalField& field);

inline constexpr double kModeTailTolerance = 1e-8;

/// Delta w + (m-1)|grad w|^2 at every grid node (radii > 0).
std::vector<double> field_sign_gate(const SphericalField& field);

/// Throws PreconditionError when the input violates the gate somewhere;
/// returns whether the symmetrized profile satisfies it at every radius.
bool verify_sign_preservation(const SphericalField& field);

struct RatioCurve {
  std::vector<double> r;
  std::vector<double> ratio;  // e^{-w-bar} times the polar mean of e^w
  double tail = 0.0;          // ratio at the outermost radius
};

/// Throws LimitError when the outer ratios move away from each other.
RatioCurve mean_ratio(const SphericalField& field);

struct SymmetrizationReport {
  std::string field_id;
  RadialProfile wbar;
  double shell_defect = 0.0;
  bool sign_checked = false;  // false when the input violates the gate
  bool sign_preserved = false;
  RatioCurve ratio;
};

SymmetrizationReport symmetrize_report(const SphericalField& field);

struct ProbeReport {
  std::vector<double> center;      // axial coordinate of each probe center
  std::vector<double> deviation;   // max_rho |u_P(rho) - u_P(rho_0)|
  double max_deviation = 0.0;
};

/// Means of u = w - v over spheres |x - P| = rho for P at the origin and at
/// the axial points +-1, where v is the Green's potential of (-Delta)^m w.
ProbeReport constancy_probe(const RadialProfile& w, const QuadratureSpec& quad);

struct ConstancyReport {
  double max_abs_q = 0.0;
  double min_scalar = 0.0;
  bool hypotheses_hold = false;    // |Q| < 1e-8 and R >= 0 on radii up to 1e3
  std::vector<double> coefficients;
  double max_nonconstant = 0.0;
  bool constant = false;           // all non-constant coefficients below 1e-4
};

/// For a profile with Q = 0 and R >= 0 the basis decomposition must reduce to
/// its constant term. The hypotheses are probed out to r = 1e3, the
/// decomposition uses log-spaced radii in [r_lo, r_hi]; profiles outside the
/// span of the basis leave `coefficients` empty.
ConstancyReport constancy_check(const RadialProfile& p, double r_lo = 0.25, double r_hi = 8.0);

}  // namespace qcurv
