#include "qcurv/quadrature.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qcurv/error.hpp"

namespace qcurv {
namespace {

void check_error(const IntegralResult& r, double abs_tol, double rel_tol, const char* what) {
  if (!std::isfinite(r.value) || r.error > abs_tol + rel_tol * r.l1 * 1e3) {
    std::ostringstream msg;
    msg << what << " did not converge: value " << r.value << ", error estimate " << r.error;
    throw QuadratureError(msg.str());
  }
}

}  // namespace

IntegralResult integrate(const ScalarFn& f, double a, double b, double abs_tol, double rel_tol) {
  IntegralResult r;
  if (a == b) return r;
  using rule = boost::math::quadrature::gauss_kronrod<double, 61>;
  // Boost only understands a relative tolerance; convert abs_tol using a
  // single-panel estimate of the L1 norm so noisy tails are not chased.
  double l1_guess = 0.0;
  rule::integrate(f, a, b, 0, 1.0, nullptr, &l1_guess);
  const double tol = l1_guess > 0.0 ? std::max(rel_tol, abs_tol / l1_guess) : rel_tol;
  r.value = rule::integrate(f, a, b, 15, tol, &r.error, &r.l1);
  check_error(r, abs_tol, rel_tol, "Gauss-Kronrod quadrature");
  return r;
}

IntegralResult integrate_panels(const ScalarFn& f, std::span<const double> pts, double abs_tol,
                                double rel_tol) {
  IntegralResult total;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] <= pts[i]) continue;
    const IntegralResult part = integrate(f, pts[i], pts[i + 1], abs_tol, rel_tol);
    total.value += part.value;
    total.error += part.error;
    total.l1 += part.l1;
  }
  return total;
}

IntegralResult integrate_endpoint_singular(const ScalarFn& f, double a, double b, double abs_tol,
                                           double rel_tol) {
  IntegralResult r;
  if (a == b) return r;
  thread_local boost::math::quadrature::tanh_sinh<double> rule(12);
  r.value = rule.integrate(f, a, b, rel_tol, &r.error, &r.l1);
  check_error(r, abs_tol, rel_tol, "tanh-sinh quadrature");
  return r;
}

double polar_weight_norm(const Dim& dim) {
  // int_0^pi sin^{n-2} = sqrt(pi) Gamma((n-1)/2) / Gamma(n/2)
  return std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (dim.n - 1)) / std::tgamma(0.5 * dim.n);
}

double sphere_mean(const ScalarFn& f, const Dim& dim, double singular_angle, double abs_tol) {
  const int p = dim.n - 2;
  auto weighted = [&](double t) {
    const double w = std::pow(std::sin(t), p);
    return w == 0.0 ? 0.0 : f(t) * w;
  };
  double total = 0.0;
  double split = 0.0;
  if (singular_angle > 0.0) {
    split = std::min(singular_angle, std::numbers::pi);
    total += integrate_endpoint_singular(weighted, 0.0, split, abs_tol).value;
  }
  if (split < std::numbers::pi) {
    const double mid = 0.5 * (split + std::numbers::pi);
    const double pts[] = {split, std::min(mid, split + 4.0 * std::max(split, 1e-3)), std::numbers::pi};
    total += integrate_panels(weighted, pts, abs_tol).value;
  }
  return total / polar_weight_norm(dim);
}

PolarRule gegenbauer_gauss(int count, const Dim& dim) {
  if (count < 1) throw DomainError("polar rule needs at least one node");
  // Jacobi matrix of the Gegenbauer weight (1-x^2)^{lambda-1/2}, lambda = (n-2)/2.
  // For n = 2 (lambda = 0) the Chebyshev limit is used.
  const double lambda = 0.5 * (dim.n - 2);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(count, count);
  for (int k = 1; k < count; ++k) {
    double b2;
    if (lambda == 0.0)
      b2 = (k == 1) ? 0.5 : 0.25;
    else
      b2 = k * (k + 2.0 * lambda - 1.0) / (4.0 * (k + lambda) * (k + lambda - 1.0));
    jac(k, k - 1) = jac(k - 1, k) = std::sqrt(b2);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  PolarRule rule;
  rule.x.resize(count);
  rule.theta.resize(count);
  rule.weight.resize(count);
  double sum = 0.0;
  for (int j = 0; j < count; ++j) {
    const double v0 = es.eigenvectors()(0, j);
    rule.x[j] = es.eigenvalues()[j];
    rule.weight[j] = v0 * v0;
    sum += rule.weight[j];
  }
  for (int j = 0; j < count; ++j) {
    rule.weight[j] /= sum;
    rule.theta[j] = std::acos(std::clamp(rule.x[j], -1.0, 1.0));
  }
  return rule;
}

std::vector<double> gegenbauer_values(int lmax, double lambda, double x) {
  std::vector<double> c(lmax + 1);
  c[0] = 1.0;
  if (lmax == 0) return c;
  if (lambda == 0.0) {
    // Chebyshev-type limit: use T_l (any normalization works for projections).
    c[1] = x;
    for (int l = 2; l <= lmax; ++l) c[l] = 2.0 * x * c[l - 1] - c[l - 2];
    return c;
  }
  c[1] = 2.0 * lambda * x;
  for (int l = 2; l <= lmax; ++l)
    c[l] = (2.0 * x * (l + lambda - 1.0) * c[l - 1] - (l + 2.0 * lambda - 2.0) * c[l - 2]) / l;
  return c;
}

Extrapolation extrapolate_to_zero(std::span<const double> h, std::span<const double> y) {
  const std::size_t n = h.size();
  if (n == 0 || y.size() != n) throw DomainError("extrapolation needs matching samples");
  std::vector<double> p(y.begin(), y.end());
  Extrapolation ex;
  double prev = p[0];
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      const double hi = h[i], hj = h[i + level];
      p[i] = (hi * p[i + 1] - hj * p[i]) / (hi - hj);
    }
    ex.error = std::abs(p[0] - prev);
    prev = p[0];
  }
  ex.value = p[0];
  if (n == 1) ex.error = std::numeric_limits<double>::infinity();
  return ex;
}

Extrapolation integrate_to_infinity(const ScalarFn& f, double a, double r0, int levels, double abs_tol,
                                   double rel_tol) {
  if (!(r0 > a)) throw DomainError("first cutoff must exceed the lower limit");
  std::vector<double> h, y;
  double partial = integrate(f, a, r0, abs_tol, rel_tol).value;
  double lo = r0;
  for (int k = 0; k < levels; ++k) {
    if (k > 0) {
      partial += integrate(f, lo, 2.0 * lo, abs_tol, rel_tol).value;
      lo *= 2.0;
    }
    h.push_back(1.0 / (lo * lo));
    y.push_back(partial);
  }
  return extrapolate_to_zero(h, y);
}

}  // namespace qcurv
