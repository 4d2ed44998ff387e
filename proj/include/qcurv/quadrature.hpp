#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qcurv/core.hpp"

namespace qcurv {

using ScalarFn = std::function<double(double)>;

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

/// Adaptive Gauss-Kronrod (61 points). b may be +infinity. Throws
/// QuadratureError when the error estimate exceeds abs_tol + rel_tol * |I|_1.
IntegralResult integrate(const ScalarFn& f, double a, double b, double abs_tol = 1e-13,
                         double rel_tol = 1e-12);

/// Same, over consecutive panels [pts[0], pts[1]], [pts[1], pts[2]], ...
IntegralResult integrate_panels(const ScalarFn& f, std::span<const double> pts,
                                double abs_tol = 1e-13, double rel_tol = 1e-12);

/// Double-exponential rule for integrands with integrable endpoint
/// singularities (logarithmic or weak algebraic).
IntegralResult integrate_endpoint_singular(const ScalarFn& f, double a, double b,
                                           double abs_tol = 1e-13, double rel_tol = 1e-12);

/// Normalized measure of S^{n-1} pushed to the polar angle:
/// sin^{n-2}(theta) dtheta / int_0^pi sin^{n-2}.
double polar_weight_norm(const Dim& dim);

/// Average over S^{n-1} of a function of the polar angle. `singular_angle`,
/// when in (0, pi], splits off [0, singular_angle] and integrates it with the
/// double-exponential rule (for log/peaked integrands near theta = 0).
double sphere_mean(const ScalarFn& f_of_theta, const Dim& dim, double singular_angle = 0.0,
                   double abs_tol = 1e-13);

/// Gauss rule for the weight (1 - x^2)^{(n-3)/2} on [-1, 1], x = cos(theta).
/// Weights are normalized to sum to 1.
struct PolarRule {
  std::vector<double> x;  // cos(theta_j), increasing
  std::vector<double> theta;
  std::vector<double> weight;
};
PolarRule gegenbauer_gauss(int count, const Dim& dim);

/// Gegenbauer polynomials C_l^{lambda}(x) for l = 0..lmax.
std::vector<double> gegenbauer_values(int lmax, double lambda, double x);

/// Polynomial extrapolation to h = 0 (Neville) of samples y(h_i).
struct Extrapolation {
  double value = 0.0;
  double error = 0.0;  // difference between the two highest tableau levels
};
Extrapolation extrapolate_to_zero(std::span<const double> h, std::span<const double> y);

/// int_a^infinity f for integrands with a tail expansion in odd powers of 1/r:
/// partial integrals up to R_k = r0 2^k (k < levels) extrapolated in 1/R^2.
Extrapolation integrate_to_infinity(const ScalarFn& f, double a, double r0 = 16.0, int levels = 6,
                                   double abs_tol = 1e-13, double rel_tol = 1e-12);

}  // namespace qcurv
