#pragma once

#include <functional>

#include "qcurv/core.hpp"

namespace qcurv {

/// Expansion point for radial expressions. At r0 = 0 division by r is done
/// exactly as a coefficient shift, which is valid for odd functions of r.
struct RadialPoint {
  double r0 = 0.0;
  Jet r;

  RadialPoint(double r0_, int order) : r0(r0_), r(Jet::variable(r0_, order)) {}

  Jet over_r(const Jet& odd) const;
  /// Division by r^2; at the origin the input must vanish to second order.
  Jet over_r2(const Jet& u) const;
};

using RadialExpr = std::function<Jet(const RadialPoint&)>;

/// Below this radius even expressions are expanded at the origin and the
/// Taylor polynomial is evaluated, avoiding 1/r cancellation.
inline constexpr double kOriginSwitchRadius = 0.02;
inline constexpr int kDefaultJetOrder = 16;

/// Jet of `expr` at r. When `even` and r is small, the expansion is taken at
/// the origin and shifted.
Jet radial_jet(const RadialExpr& expr, double r, bool even, int order = kDefaultJetOrder);
double radial_eval(const RadialExpr& expr, double r, bool even, int order = kDefaultJetOrder);

/// u'' + (n-1)/r u' for a radial u.
Jet flat_laplacian(const Jet& u, const RadialPoint& pt, int n);
/// Laplacian of u(r) Y_l for a degree-l spherical harmonic Y_l:
/// u'' + (n-1)/r u' - l(l+n-2)/r^2 u.
Jet flat_laplacian_mode(const Jet& u, const RadialPoint& pt, int n, int l);
/// k-fold flat Laplacian of a radial function.
Jet flat_laplacian_power(const Jet& u, const RadialPoint& pt, int n, int k);

/// Flat divergence of the radial vector field V(r) x/|x|: V' + (n-1) V/r.
Jet radial_divergence(const Jet& v, const RadialPoint& pt, int n);

/// Wraps a radial expression as a RadialFn: the expression's Taylor jet at the
/// requested radius is composed with the caller's radius jet.
RadialFn radial_fn(RadialExpr expr, bool even, double lo = 0.0,
                   double hi = std::numeric_limits<double>::infinity());

/// Delta^k u as a RadialFn.
RadialFn laplacian_power_fn(const RadialFn& u, int n, int k);

}  // namespace qcurv
