#pragma once

// Spherical-mean kernels and the log-kernel Green's function on R^n.
//
// All means are over |x| = r with |y| = s fixed, reduced to the polar angle
// between x and y:  |x - y|^2 = (r - s)^2 + 4 r s sin^2(theta / 2).

#include <vector>

#include "qcurv/core.hpp"

namespace qcurv {

/// Mean of |x - y|^{-2}. Requires (r, s) != (0, 0); for n = 2 also r != s.
double kernel_II(double r, double s, const Dim& dim);
/// Mean of (r^2 - s^2 + |x - y|^2) / (2 |x - y|^2).
double kernel_G(double r, double s, const Dim& dim);
/// Mean of ln(s / |x - y|). Requires s > 0.
double kernel_log(double r, double s, const Dim& dim);

struct KernelTable {
  Dim dim;
  std::vector<double> r, s;
  // Row-major, index i * s.size() + j.
  std::vector<double> II, G, L;

  double at_II(std::size_t i, std::size_t j) const { return II[i * s.size() + j]; }
  double at_G(std::size_t i, std::size_t j) const { return G[i * s.size() + j]; }
  double at_L(std::size_t i, std::size_t j) const { return L[i * s.size() + j]; }
};

KernelTable kernel_table(const Dim& dim, std::vector<double> r, std::vector<double> s);

struct KernelStructureReport {
  double C = 0.0;           // max of the two fitted constants
  double C_inner = 0.0;     // sup |r^2 II - 1| r^2 / s^2 over s < r
  double C_outer = 0.0;     // sup II s^2 over s > r
  std::vector<double> poly; // p_1..p_{m-1}, r^2 II = 1 + sum p_k (s^2/r^2)^k
  double residual = 0.0;
  bool degenerate = false;  // n = 2: no polynomial part is allowed
  int samples = 0;
};

/// Fits the constants and the polynomial structure of r^2 II. Throws
/// StructureViolation when the fit residual exceeds 1e-6 (except in the
/// degenerate n = 2 case, which is flagged instead).
KernelStructureReport verify_kernel_structure(const Dim& dim, const std::vector<double>& r, const std::vector<double>& s);

struct GreensSolution {
  RadialProfile v;
  std::vector<double> r;        // nodes where v was computed by quadrature
  std::vector<double> values;
  double tail_bound = 0.0;      // C_n |S| int_{s > cutoff} |f| s^{n-1}
  double max_residual = 0.0;    // max |(-Delta)^m v - f| / sup|f| at interior nodes
};

/// v(r) = C_n |S^{n-1}| int_0^inf L(r, s) f(s) s^{n-1} ds, so that
/// (-Delta)^m v = f and v(0) = 0. The s-integral is carried to
/// kOuterFactor * quad.r_max; the remaining tail mass must be below quad.eps.
GreensSolution greens_solve(const RadialFn& f, const Dim& dim, const QuadratureSpec& quad);

inline constexpr double kOuterFactor = 10.0;

/// r v'(r) = -C_n |S^{n-1}| int_0^inf G(r, s) f(s) s^{n-1} ds.
double r_vdot(const RadialFn& f, const Dim& dim, double r, double cutoff);

struct RvDotLimits {
  double at_zero = 0.0, at_zero_error = 0.0;
  double at_infinity = 0.0, at_infinity_error = 0.0;
};

/// Richardson-extrapolated limits of r v' at 0 (in r^2) and at infinity (in
/// 1/r^2). Throws LimitError when the extrapolation does not settle.
RvDotLimits rv_dot_limits(const RadialFn& f, const Dim& dim, const QuadratureSpec& quad);

struct GreensBounds {
  double sup_r_vdot = 0.0;
  double sup_r2_lap = 0.0;
  double r_max = 0.0;
};

/// sup over r in (0, r_max] of r |v'| and r^2 |Delta v| for v from greens_solve.
GreensBounds greens_sups(const GreensSolution& sol, double r_max);

}  // namespace qcurv
