#pragma once

#include <span>
#include <vector>

namespace qcurv {

// Interpolating B-spline of odd degree k on strictly increasing sites, with
// not-a-knot style interior knots (every site except the (k-1)/2 nearest each
// end is a knot). The interpolant is C^{k-1}.
class BSplineInterpolant {
 public:
  BSplineInterpolant(std::span<const double> x, std::span<const double> y, int degree);

  int degree() const { return degree_; }
  double lo() const { return knots_.front(); }
  double hi() const { return knots_.back(); }

  // Fills out[0..max_order] with derivatives at x. Orders above the degree are
  // zero. x must lie in [lo, hi].
  void derivatives(double x, int max_order, std::span<double> out) const;
  double operator()(double x) const;

 private:
  int find_span(double x) const;

  int degree_;
  std::vector<double> knots_;
  std::vector<double> coeffs_;
};

}  // namespace qcurv
