#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "qcurv/jet.hpp"
#include "qcurv/spline.hpp"

namespace qcurv {

/// Even dimension n = 2m together with the normalization constants that every
/// total-curvature computation uses.
struct Dim {
  int n = 4;
  int m = 2;
  double sphere_volume = 0.0;  // |S^{n-1}|
  double c_n = 0.0;            // 1 / (((n-2)!!)^2 |S^{n-1}|)
};

/// Supported range is n in {2, 4, 6, 8}; anything else throws DimensionError.
Dim make_dim(int n);

double double_factorial(int k);

struct QuadratureSpec {
  int radial_nodes = 160;
  int angular_nodes = 24;
  double r_max = 100.0;
  bool split_log_singularity = true;
  double eps = 1e-5;
  int extrapolation_order = 3;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Radial functions

/// One closed-form term of an analytic conformal factor.
struct AnalyticTerm {
  enum class Kind { Log1pSq, Log, Power };
  Kind kind = Kind::Log1pSq;
  double c = 0.0;
  double param = 1.0;  // rho for Log1pSq, exponent p for Power, unused for Log

  static AnalyticTerm log1p_sq(double c, double rho) { return {Kind::Log1pSq, c, rho}; }
  static AnalyticTerm log(double c) { return {Kind::Log, c, 0.0}; }
  static AnalyticTerm power(double c, double p) { return {Kind::Power, c, p}; }
};

const char* term_kind_name(AnalyticTerm::Kind kind);

/// A radial function given through its Taylor expansion: `eval` receives the
/// radius as a jet and returns the function composed with it.
struct RadialFn {
  std::function<Jet(const Jet&)> eval;
  bool even_at_origin = true;  // smooth and even in r, so r = 0 is admissible
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  Jet jet_at(double r, int order) const;
  double operator()(double r, int order = 0) const { return jet_at(r, order).derivative_value(order); }

  friend RadialFn operator+(const RadialFn& a, const RadialFn& b);
  friend RadialFn operator-(const RadialFn& a, const RadialFn& b);
  friend RadialFn operator*(const RadialFn& a, const RadialFn& b);
  friend RadialFn operator*(double s, const RadialFn& a);
};

RadialFn constant_fn(double value);

/// Conformal factor w(r) of a radial LCF metric e^{2w} g0 on R^n (or on
/// R^n minus the origin when punctured).
class RadialProfile {
 public:
  struct Sampled {
    std::vector<double> r;
    std::vector<double> w;
    std::shared_ptr<const BSplineInterpolant> spline;
  };

  static RadialProfile analytic(const Dim& dim, std::vector<AnalyticTerm> terms,
                                bool punctured_origin = false);
  static RadialProfile sampled(const Dim& dim, std::vector<double> r, std::vector<double> w,
                               bool punctured_origin = false);
  /// Samples `fn` on `grid` and interpolates.
  static RadialProfile sample(const Dim& dim, const RadialFn& fn, std::vector<double> grid,
                              bool punctured_origin = false);

  const Dim& dim() const { return dim_; }
  bool punctured_origin() const { return punctured_; }
  bool is_analytic() const { return std::holds_alternative<std::vector<AnalyticTerm>>(rep_); }
  const std::vector<AnalyticTerm>& terms() const;
  const Sampled& samples() const;

  double domain_lo() const;
  double domain_hi() const;

  /// d^order w / dr^order at r. Throws DomainError / OrderError.
  double eval(double r, int order = 0) const;

  /// Taylor jet of w at r (no order cap beyond the representation's own).
  Jet jet_at(double r, int order) const;
  /// w composed with a radius jet.
  Jet compose(const Jet& r) const;

  RadialFn as_fn() const;

  /// Sum of ln-coefficients at infinity for analytic profiles: 2*c for
  /// log1p_sq, c for log. Power terms with p > 0 make it infinite.
  double analytic_log_coefficient_at_infinity() const;
  /// Coefficient of ln r at the origin for analytic profiles.
  double analytic_log_coefficient_at_origin() const;

 private:
  RadialProfile(const Dim& dim, bool punctured) : dim_(dim), punctured_(punctured) {}
  void check_radius(double r) const;

  Dim dim_;
  bool punctured_ = false;
  std::variant<std::vector<AnalyticTerm>, Sampled> rep_;
};

/// Convenience: the w_a = (a/2) ln(1 + r^2) family.
RadialProfile w_a_profile(const Dim& dim, double a);
/// ln 2 - ln(1 + r^2): the round sphere pulled back by stereographic projection.
RadialProfile round_sphere_profile(const Dim& dim);
/// -ln r on R^n minus the origin: the cylinder S^{n-1} x R.
RadialProfile cylinder_profile(const Dim& dim);
RadialProfile flat_profile(const Dim& dim);

/// r_i = scale * sinh(i h): uniform near the origin, geometric at large r.
std::vector<double> sinh_grid(int count, double r_max, double scale = 1.0);
std::vector<double> geometric_grid(int count, double r_min, double r_max);

/// Degree of the spline used for sampled profiles in dimension n. Derivatives
/// up to order n are needed; the extra degrees keep the n-th derivative
/// accurate to O(h^6).
int sampled_spline_degree(const Dim& dim);

}  // namespace qcurv
