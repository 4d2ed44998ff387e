#pragma once

#include <string>
#include <vector>

#include "qcurv/core.hpp"

namespace qcurv {

enum class EndLocation { Origin, Infinity };
const char* end_location_name(EndLocation loc);

enum class Completeness { Complete, Incomplete, BorderlineResolved };
const char* completeness_name(Completeness c);

/// Delta^k applied to w at r, 0 <= k <= m. At r = 0 the removable
/// singularity is resolved by expanding at the origin (smooth profiles only).
/// Power and log terms of analytic profiles use the exact power rule.
double radial_delta_power(const RadialProfile& p, int k, double r);

/// r^{n-1} d/dr Delta^{m-1} w: the flux of grad Delta^{m-1} w through |x| = r
/// divided by |S^{n-1}|.
double radial_flux(const RadialProfile& p, double r);

struct BasisFunction {
  std::string label;  // "1", "ln r", "r^2", "r^-2", ...
  bool is_log = false;
  int power = 0;      // exponent when !is_log
  double operator()(double r) const;
  RadialFn fn() const;
};

/// {1, ln r, r^2, ..., r^{n-2}, r^{-2}, ..., r^{2-n}}: exactly n functions,
/// spanning the radial solutions of Delta^m u = 0 away from the origin.
std::vector<BasisFunction> polyharmonic_basis(const Dim& dim);

struct Decomposition {
  std::vector<double> coefficients;  // in polyharmonic_basis order
  double residual = 0.0;             // ||A c - u||_2
  double norm = 0.0;                 // ||u||_2
};

/// Least-squares fit of samples u(r_i) onto the basis, on column-scaled
/// design matrices. Needs at least 2n radii spanning a decade. Throws
/// NotPolyharmonic when residual > relative_tol ||u|| + absolute_tol.
Decomposition basis_decompose(const std::vector<double>& r, const std::vector<double>& u, const Dim& dim,
                              double relative_tol = 1e-6, double absolute_tol = 0.0);

struct ExponentEstimate {
  double c1 = 0.0;
  double lo = 0.0, hi = 0.0;  // confidence interval from the extrapolation error
};

/// Limit of r w'(r) toward the end, Richardson-extrapolated.
ExponentEstimate asymptotic_exponent(const RadialProfile& p, EndLocation end);

struct CompletenessReport {
  Completeness verdict = Completeness::Incomplete;
  ExponentEstimate exponent;
  bool borderline = false;
  // Borderline resolution: int e^w dr toward the end, rewritten in t = |ln r|.
  double decay_exponent = 0.0;   // fitted p in e^{w + t} ~ t^{-p}
  double projected_sum = 0.0;    // projected partial sum at the last shell
  int shells_to_threshold = -1;  // shells needed to pass the divergence threshold (-1: never)
};

inline constexpr double kBorderlineTolerance = 1e-3;
inline constexpr double kDivergenceThreshold = 1e3;

CompletenessReport completeness_check(const RadialProfile& p, EndLocation end);

/// True iff d e^w stays bounded toward the end (d = r at infinity, d = r at
/// an origin puncture as the distance to the puncture).
bool equality_case_check(const RadialProfile& p, EndLocation end = EndLocation::Infinity);

/// Delta w + (m-1)|grad w|^2, whose non-positivity is equivalent to R >= 0.
double scalar_sign_gate(const RadialProfile& p, double r);

struct EndSpec {
  std::string label;
  EndLocation location = EndLocation::Infinity;
  RadialProfile profile;
  double c1 = 0.0;
  Completeness completeness = Completeness::Incomplete;
};

/// Builds an EndSpec, filling c1 and the completeness verdict.
EndSpec make_end(std::string label, EndLocation loc, const RadialProfile& p);

}  // namespace qcurv
