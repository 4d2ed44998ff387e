#include "qcurv/radial_ops.hpp"

namespace qcurv {
namespace {

Jet shift_down(const Jet& u, int by) {
  if (u.order() < by) throw OrderError("jet order too low for division by a power of r");
  Jet out = Jet::constant(0.0, u.order() - by);
  for (int k = 0; k <= out.order(); ++k) out.set_coeff(k, u.coeff(k + by));
  return out;
}

}  // namespace

Jet RadialPoint::over_r(const Jet& odd) const {
  if (r0 == 0.0) return shift_down(odd, 1);
  return odd / r;
}

Jet RadialPoint::over_r2(const Jet& u) const {
  if (r0 == 0.0) return shift_down(u, 2);
  return u / (r * r);
}

Jet radial_jet(const RadialExpr& expr, double r, bool even, int order) {
  if (even && r < kOriginSwitchRadius) {
    const Jet at0 = expr(RadialPoint(0.0, order));
    return r == 0.0 ? at0 : at0.shifted(r);
  }
  return expr(RadialPoint(r, order));
}

double radial_eval(const RadialExpr& expr, double r, bool even, int order) {
  return radial_jet(expr, r, even, order).value();
}

Jet flat_laplacian(const Jet& u, const RadialPoint& pt, int n) {
  const Jet du = u.derivative();
  return du.derivative() + (n - 1) * pt.over_r(du).truncated(du.order() - 1);
}

Jet flat_laplacian_mode(const Jet& u, const RadialPoint& pt, int n, int l) {
  if (l == 0) return flat_laplacian(u, pt, n);
  const Jet du = u.derivative();
  const Jet ddu = du.derivative();
  const Jet numer = pt.r * pt.r * ddu + (n - 1) * pt.r * du - static_cast<double>(l * (l + n - 2)) * u;
  return pt.over_r2(numer).truncated(ddu.order());
}

Jet flat_laplacian_power(const Jet& u, const RadialPoint& pt, int n, int k) {
  Jet acc = u;
  for (int i = 0; i < k; ++i) acc = flat_laplacian(acc, pt, n);
  return acc;
}

Jet radial_divergence(const Jet& v, const RadialPoint& pt, int n) {
  return v.derivative() + (n - 1) * pt.over_r(v).truncated(v.order() - 1);
}

RadialFn radial_fn(RadialExpr expr, bool even, double lo, double hi) {
  RadialFn f;
  f.even_at_origin = even;
  f.lo = lo;
  f.hi = hi;
  f.eval = [expr = std::move(expr), even](const Jet& r) {
    const Jet at = radial_jet(expr, r.value(), even, kDefaultJetOrder);
    return compose(at, r);
  };
  return f;
}

RadialFn laplacian_power_fn(const RadialFn& u, int n, int k) {
  return radial_fn([u, n, k](const RadialPoint& pt) { return flat_laplacian_power(u.eval(pt.r), pt, n, k); },
                   u.even_at_origin, u.lo, u.hi);
}

}  // namespace qcurv
