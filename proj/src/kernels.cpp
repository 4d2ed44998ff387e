#include "qcurv/kernels.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "qcurv/parallel.hpp"
#include "qcurv/quadrature.hpp"
#include "qcurv/radial_ops.hpp"

namespace qcurv {
namespace {

double dist2(double r, double s, double theta) {
  const double h = std::sin(0.5 * theta);
  return (r - s) * (r - s) + 4.0 * r * s * h * h;
}

// Width of the peak of |x - y|^{-2} near theta = 0 when r and s are close.
double singular_angle(double r, double s) {
  if (r <= 0.0 || s <= 0.0) return 0.0;
  const double width = std::abs(r - s) / std::sqrt(r * s);
  if (width > 0.5) return 0.0;
  return std::min(std::numbers::pi, std::max(20.0 * width, 0.05));
}

void check_pair(double r, double s) {
  if (!(r >= 0.0) || !(s >= 0.0)) throw DomainError("kernel radii must be non-negative");
  if (r == 0.0 && s == 0.0) throw DomainError("kernel undefined at r = s = 0");
}

}  // namespace

double kernel_II(double r, double s, const Dim& dim) {
  check_pair(r, s);
  if (s == 0.0) return 1.0 / (r * r);
  if (r == 0.0) return 1.0 / (s * s);
  if (dim.n == 2 && r == s) throw DomainError("II diverges at r = s in dimension 2");
  return sphere_mean([&](double t) { return 1.0 / dist2(r, s, t); }, dim, singular_angle(r, s));
}

double kernel_G(double r, double s, const Dim& dim) {
  check_pair(r, s);
  if (s == 0.0) return 1.0;
  if (r == 0.0) return 0.0;
  if (dim.n == 2 && r == s) throw DomainError("G is discontinuous at r = s in dimension 2");
  const double diff = r * r - s * s;
  return sphere_mean(
      [&](double t) {
        const double d2 = dist2(r, s, t);
        return (diff + d2) / (2.0 * d2);
      },
      dim, singular_angle(r, s));
}

double kernel_log(double r, double s, const Dim& dim) {
  if (!(r >= 0.0)) throw DomainError("kernel radii must be non-negative");
  if (!(s > 0.0)) throw DomainError("kernel_log needs s > 0");
  if (r == 0.0) return 0.0;
  const double ls = std::log(s);
  double split = singular_angle(r, s);
  if (r == s) split = 0.05;
  return sphere_mean(
      [&](double t) { return ls - std::log(std::hypot(r - s, 2.0 * std::sqrt(r * s) * std::sin(0.5 * t))); }, dim,
      split);
}

KernelTable kernel_table(const Dim& dim, std::vector<double> r, std::vector<double> s) {
  KernelTable t;
  t.dim = dim;
  t.r = std::move(r);
  t.s = std::move(s);
  const std::size_t ns = t.s.size();
  const std::size_t total = t.r.size() * ns;
  t.II.assign(total, 0.0);
  t.G.assign(total, 0.0);
  t.L.assign(total, 0.0);
  parallel_for(total, [&](std::size_t k) {
    const double ri = t.r[k / ns], sj = t.s[k % ns];
    t.II[k] = kernel_II(ri, sj, dim);
    t.G[k] = kernel_G(ri, sj, dim);
    t.L[k] = sj > 0.0 ? kernel_log(ri, sj, dim) : -std::numeric_limits<double>::infinity();
  });
  return t;
}

KernelStructureReport verify_kernel_structure(const Dim& dim, const std::vector<double>& r, const std::vector<double>& s) {
  KernelStructureReport rep;
  rep.degenerate = dim.m == 1;
  const int deg = dim.m - 1;
  std::vector<double> ts, ys;
  for (double ri : r) {
    for (double sj : s) {
      if (ri == sj) throw DomainError("kernel structure grids must avoid r = s");
      if (ri <= 0.0 && sj <= 0.0) continue;
      const double ii = kernel_II(ri, sj, dim);
      ++rep.samples;
      if (sj < ri) {
        const double t = (sj * sj) / (ri * ri);
        const double y = ri * ri * ii - 1.0;
        if (t > 0.0) rep.C_inner = std::max(rep.C_inner, std::abs(y) / t);
        ts.push_back(t);
        ys.push_back(y);
      } else {
        rep.C_outer = std::max(rep.C_outer, ii * sj * sj);
      }
    }
  }
  rep.C = std::max(rep.C_inner, rep.C_outer);
  if (ts.empty()) return rep;

  if (deg == 0) {
    // No polynomial part is admissible; the residual is r^2 II - 1 itself.
    for (double y : ys) rep.residual = std::max(rep.residual, std::abs(y));
    return rep;
  }
  Eigen::MatrixXd a(ts.size(), deg);
  Eigen::VectorXd b(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k < deg; ++k) {
      p *= ts[i];
      a(i, k) = p;
    }
    b[i] = ys[i];
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  rep.poly.assign(coef.data(), coef.data() + coef.size());
  rep.residual = (a * coef - b).cwiseAbs().maxCoeff();
  if (rep.residual > 1e-6)
    throw StructureViolation("r^2 II deviates from 1 + p(s^2/r^2) by " + std::to_string(rep.residual));
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> panel_points(double r, double cutoff) {
  std::set<double> pts{0.0, cutoff};
  for (double p = 1.0 / 16.0; p < cutoff; p *= 2.0) pts.insert(p);
  if (r > 0.0)
    for (double p : {0.5 * r, r, 2.0 * r})
      if (p < cutoff) pts.insert(p);
  return {pts.begin(), pts.end()};
}

double weighted_integral(const std::function<double(double)>& kernel, const RadialFn& f, const Dim& dim,
                         double r, double cutoff) {
  const int n = dim.n;
  auto h = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double fs = f(s);
    if (fs == 0.0) return 0.0;
    return kernel(s) * fs * std::pow(s, n - 1);
  };
  const auto pts = panel_points(r, cutoff);
  return dim.c_n * dim.sphere_volume * integrate_panels(h, pts, 1e-13, 1e-11).value;
}

double tail_mass(const RadialFn& f, const Dim& dim, double cutoff) {
  const int n = dim.n;
  auto h = [&](double s) { return std::abs(f(s)) * std::pow(s, n - 1); };
  const double i0 = integrate(h, cutoff, 2.0 * cutoff, 1e-12, 1e-8).value;
  const double i1 = integrate(h, 2.0 * cutoff, 4.0 * cutoff, 1e-12, 1e-8).value;
  if (i0 == 0.0 && i1 == 0.0) return 0.0;
  const double q = i1 / i0;
  if (!(q < 0.9)) throw IntegrabilityError("source term is not integrable: shell masses do not decay");
  return dim.c_n * dim.sphere_volume * i0 / (1.0 - q);
}

}  // namespace

double r_vdot(const RadialFn& f, const Dim& dim, double r, double cutoff) {
  if (r == 0.0) return 0.0;
  return -weighted_integral([&](double s) { return kernel_G(r, s, dim); }, f, dim, r, cutoff);
}

GreensSolution greens_solve(const RadialFn& f, const Dim& dim, const QuadratureSpec& quad) {
  quad.validate();
  const double cutoff = kOuterFactor * quad.r_max;
  GreensSolution sol{RadialProfile::analytic(dim, {}), {}, {}, 0.0, 0.0};
  sol.tail_bound = tail_mass(f, dim, cutoff);
  if (sol.tail_bound > quad.eps)
    throw IntegrabilityError("tail mass beyond the outer cutoff is " + std::to_string(sol.tail_bound) +
                             ", above the quadrature tolerance");

  sol.r = sinh_grid(quad.radial_nodes, quad.r_max, 1.0);
  sol.values.assign(sol.r.size(), 0.0);
  parallel_for(sol.r.size(), [&](std::size_t i) {
    const double r = sol.r[i];
    if (r == 0.0) return;
    sol.values[i] = weighted_integral([&](double s) { return kernel_log(r, s, dim); }, f, dim, r, cutoff);
  });
  sol.v = RadialProfile::sampled(dim, sol.r, sol.values);

  // Residual of (-Delta)^m v against f at interior nodes.
  double fmax = 0.0, res = 0.0;
  const double sign = dim.m % 2 == 0 ? 1.0 : -1.0;
  for (std::size_t i = 1; i + 1 < sol.r.size(); ++i) {
    const double r = sol.r[i];
    if (r > 0.9 * quad.r_max) break;
    const double lap = radial_eval(
        [&](const RadialPoint& pt) { return flat_laplacian_power(sol.v.compose(pt.r), pt, dim.n, dim.m); }, r,
        true);
    const double fr = f(r);
    fmax = std::max(fmax, std::abs(fr));
    res = std::max(res, std::abs(sign * lap - fr));
  }
  sol.max_residual = fmax > 0.0 ? res / fmax : res;
  return sol;
}

RvDotLimits rv_dot_limits(const RadialFn& f, const Dim& dim, const QuadratureSpec& quad) {
  quad.validate();
  const double cutoff = kOuterFactor * quad.r_max;
  const double tail = tail_mass(f, dim, cutoff);
  if (tail > quad.eps) throw IntegrabilityError("source tail above tolerance");
  const int levels = quad.extrapolation_order + 1;
  RvDotLimits out;

  std::vector<double> h, y;
  for (int k = 0; k < levels; ++k) {
    const double r = 0.05 * std::pow(0.5, k);
    h.push_back(r * r);
    y.push_back(r_vdot(f, dim, r, cutoff));
  }
  const Extrapolation z = extrapolate_to_zero(h, y);
  out.at_zero = z.value;
  out.at_zero_error = z.error;

  h.clear();
  y.clear();
  for (int k = 0; k < levels; ++k) {
    const double r = quad.r_max * std::pow(2.0, k - levels + 1);
    h.push_back(1.0 / (r * r));
    y.push_back(r_vdot(f, dim, r, cutoff));
  }
  const Extrapolation inf = extrapolate_to_zero(h, y);
  out.at_infinity = inf.value;
  out.at_infinity_error = inf.error;

  const double tol = quad.eps;
  if (!(z.error <= tol * (1.0 + std::abs(z.value))) || !(inf.error <= tol * (1.0 + std::abs(inf.value))))
    throw LimitError("r v' limits did not settle: errors " + std::to_string(z.error) + ", " +
                     std::to_string(inf.error));
  return out;
}

GreensBounds greens_sups(const GreensSolution& sol, double r_max) {
  GreensBounds rep;
  rep.r_max = r_max;
  const int n = sol.v.dim().n;
  for (double r : sol.r) {
    if (r <= 0.0 || r > r_max) continue;
    const Jet j = sol.v.jet_at(r, 2);
    const double d1 = j.derivative_value(1);
    const double lap = j.derivative_value(2) + (n - 1) * d1 / r;
    rep.sup_r_vdot = std::max(rep.sup_r_vdot, r * std::abs(d1));
    rep.sup_r2_lap = std::max(rep.sup_r2_lap, r * r * std::abs(lap));
  }
  return rep;
}

}  // namespace qcurv
