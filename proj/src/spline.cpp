#include "qcurv/spline.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <string>

#include "qcurv/error.hpp"

namespace qcurv {
namespace {

// Non-zero basis functions and their derivatives on one knot span
// (Piegl & Tiller, algorithm A2.3). ders[k][j] is the k-th derivative of
// B_{span-p+j}.
void basis_derivatives(const std::vector<double>& t, int span, double x, int p, int nd,
                       std::vector<std::vector<double>>& ders) {
  std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1));
  std::vector<double> left(p + 1), right(p + 1);
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - t[span + 1 - j];
    right[j] = t[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  ders.assign(nd + 1, std::vector<double>(p + 1, 0.0));
  for (int j = 0; j <= p; ++j) ders[0][j] = ndu[j][p];
  std::vector<std::vector<double>> a(2, std::vector<double>(p + 1));
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= nd; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      ders[k][r] = d;
      std::swap(s1, s2);
    }
  }
  double fac = p;
  for (int k = 1; k <= nd; ++k) {
    for (int j = 0; j <= p; ++j) ders[k][j] *= fac;
    fac *= (p - k);
  }
}

}  // namespace

BSplineInterpolant::BSplineInterpolant(std::span<const double> x, std::span<const double> y,
                                       int degree)
    : degree_(degree) {
  const int n = static_cast<int>(x.size());
  if (degree < 1 || degree % 2 == 0) throw OrderError("spline degree must be odd");
  if (y.size() != x.size()) throw DomainError("spline sites and values differ in length");
  if (n < degree + 1)
    throw DomainError("spline needs at least " + std::to_string(degree + 1) + " sites");
  for (int i = 1; i < n; ++i)
    if (!(x[i] > x[i - 1])) throw DomainError("spline sites must be strictly increasing");

  const int k = degree;
  knots_.resize(n + k + 1);
  for (int i = 0; i <= k; ++i) {
    knots_[i] = x[0];
    knots_[n + i] = x[n - 1];
  }
  for (int j = 0; j < n - k - 1; ++j) knots_[k + 1 + j] = x[j + (k + 1) / 2];

  Eigen::SparseMatrix<double> a(n, n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * (k + 1));
  std::vector<std::vector<double>> ders;
  for (int i = 0; i < n; ++i) {
    const int span = find_span(x[i]);
    basis_derivatives(knots_, span, x[i], k, 0, ders);
    for (int j = 0; j <= k; ++j)
      if (ders[0][j] != 0.0) trips.emplace_back(i, span - k + j, ders[0][j]);
  }
  a.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw DomainError("spline collocation matrix is singular");
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) rhs[i] = y[i];
  Eigen::VectorXd sol = lu.solve(rhs);
  coeffs_.assign(sol.data(), sol.data() + n);
}

int BSplineInterpolant::find_span(double x) const {
  const int n = static_cast<int>(coeffs_.empty() ? knots_.size() - degree_ - 1 : coeffs_.size());
  if (x >= knots_[n]) return n - 1;
  if (x <= knots_[degree_]) return degree_;
  auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n + 1, x);
  return static_cast<int>(it - knots_.begin()) - 1;
}

void BSplineInterpolant::derivatives(double x, int max_order, std::span<double> out) const {
  if (x < lo() || x > hi()) throw DomainError("spline evaluated outside its grid hull");
  const int nd = std::min(max_order, degree_);
  const int span = find_span(x);
  std::vector<std::vector<double>> ders;
  basis_derivatives(knots_, span, x, degree_, nd, ders);
  for (int d = 0; d <= max_order; ++d) {
    double s = 0.0;
    if (d <= nd)
      for (int j = 0; j <= degree_; ++j) s += ders[d][j] * coeffs_[span - degree_ + j];
    out[d] = s;
  }
}

double BSplineInterpolant::operator()(double x) const {
  double v = 0.0;
  derivatives(x, 0, std::span<double>(&v, 1));
  return v;
}

}  // namespace qcurv
