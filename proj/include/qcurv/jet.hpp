#pragma once

// Truncated Taylor series ("jets") in one variable.
//
// A Jet of order K stores c[0..K] with f(x0 + h) = sum_k c[k] h^k + O(h^{K+1}).
// Arithmetic propagates the truncation order (the minimum of the operands'),
// and derivative() lowers it by one. Every radial operator in the library is
// written in terms of jets so that derivatives of composite expressions come
// out exact up to rounding.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>

#include "qcurv/error.hpp"

namespace qcurv {

class Jet {
 public:
  static constexpr int kMaxOrder = 20;

  Jet() = default;

  static Jet constant(double value, int order) {
    Jet j(order);
    j.c_[0] = value;
    return j;
  }

  // The independent variable expanded at x0.
  static Jet variable(double x0, int order) {
    Jet j(order);
    j.c_[0] = x0;
    if (order >= 1) j.c_[1] = 1.0;
    return j;
  }

  // Builds a jet from derivative values f(x0), f'(x0), ..., f^(K)(x0).
  static Jet from_derivatives(std::span<const double> derivs) {
    Jet j(static_cast<int>(derivs.size()) - 1);
    double fact = 1.0;
    for (std::size_t k = 0; k < derivs.size(); ++k) {
      if (k > 0) fact *= static_cast<double>(k);
      j.c_[k] = derivs[k] / fact;
    }
    return j;
  }

  int order() const { return order_; }
  double value() const { return c_[0]; }
  double coeff(int k) const { return k <= order_ ? c_[k] : 0.0; }
  void set_coeff(int k, double v) { c_[k] = v; }

  // k-th derivative at the expansion point.
  double derivative_value(int k) const {
    if (k > order_) throw OrderError("jet order too low for requested derivative");
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return c_[k] * fact;
  }

  Jet derivative() const {
    if (order_ < 1) throw OrderError("cannot differentiate an order-0 jet");
    Jet d(order_ - 1);
    for (int k = 0; k < order_; ++k) d.c_[k] = (k + 1) * c_[k + 1];
    return d;
  }

  Jet truncated(int order) const {
    Jet t(std::min(order, order_));
    std::copy_n(c_.begin(), t.order_ + 1, t.c_.begin());
    return t;
  }

  // Evaluates the Taylor polynomial at offset h from the expansion point.
  double evaluate(double h) const {
    double acc = 0.0;
    for (int k = order_; k >= 0; --k) acc = acc * h + c_[k];
    return acc;
  }

  // Re-expands the polynomial about x0 + h (same order).
  Jet shifted(double h) const {
    Jet out(order_);
    // Horner-style Taylor shift.
    std::array<double, kMaxOrder + 1> a{};
    std::copy_n(c_.begin(), order_ + 1, a.begin());
    for (int i = 0; i < order_; ++i)
      for (int k = order_ - 1; k >= i; --k) a[k] += h * a[k + 1];
    std::copy_n(a.begin(), order_ + 1, out.c_.begin());
    return out;
  }

  Jet& operator+=(const Jet& o) {
    order_ = std::min(order_, o.order_);
    for (int k = 0; k <= order_; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    order_ = std::min(order_, o.order_);
    for (int k = 0; k <= order_; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(double s) {
    c_[0] -= s;
    return *this;
  }
  Jet& operator*=(double s) {
    for (int k = 0; k <= order_; ++k) c_[k] *= s;
    return *this;
  }
  Jet& operator/=(double s) {
    for (int k = 0; k <= order_; ++k) c_[k] /= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }
  friend Jet operator-(Jet a) { return a *= -1.0; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet out(std::min(a.order_, b.order_));
    for (int k = 0; k <= out.order_; ++k) {
      double s = 0.0;
      for (int i = 0; i <= k; ++i) s += a.c_[i] * b.c_[k - i];
      out.c_[k] = s;
    }
    return out;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    if (b.c_[0] == 0.0) throw DomainError("jet division by a jet with zero value");
    Jet out(std::min(a.order_, b.order_));
    for (int k = 0; k <= out.order_; ++k) {
      double s = a.c_[k];
      for (int i = 1; i <= k; ++i) s -= b.c_[i] * out.c_[k - i];
      out.c_[k] = s / b.c_[0];
    }
    return out;
  }
  friend Jet operator/(double s, const Jet& b) { return Jet::constant(s, b.order_) / b; }

  friend Jet exp(const Jet& a) {
    Jet out(a.order_);
    out.c_[0] = std::exp(a.c_[0]);
    // f' = a' f  =>  k f_k = sum_{i=1..k} i a_i f_{k-i}
    for (int k = 1; k <= a.order_; ++k) {
      double s = 0.0;
      for (int i = 1; i <= k; ++i) s += i * a.c_[i] * out.c_[k - i];
      out.c_[k] = s / k;
    }
    return out;
  }

  friend Jet log(const Jet& a) {
    if (!(a.c_[0] > 0.0)) throw DomainError("jet log of a non-positive value");
    Jet out(a.order_);
    out.c_[0] = std::log(a.c_[0]);
    // a f' = a'  =>  k a_0 f_k = k a_k - sum_{i=1..k-1} i f_i a_{k-i}
    for (int k = 1; k <= a.order_; ++k) {
      double s = k * a.c_[k];
      for (int i = 1; i < k; ++i) s -= i * out.c_[i] * a.c_[k - i];
      out.c_[k] = s / (k * a.c_[0]);
    }
    return out;
  }

  // a^p for a(x0) > 0 and arbitrary real p.
  friend Jet pow(const Jet& a, double p) {
    if (!(a.c_[0] > 0.0)) throw DomainError("jet pow of a non-positive value");
    Jet out(a.order_);
    out.c_[0] = std::pow(a.c_[0], p);
    // a f' = p a' f
    for (int k = 1; k <= a.order_; ++k) {
      double s = 0.0;
      for (int i = 1; i <= k; ++i) s += (p * i - (k - i)) * a.c_[i] * out.c_[k - i];
      out.c_[k] = s / (k * a.c_[0]);
    }
    return out;
  }

  friend Jet sqrt(const Jet& a) { return pow(a, 0.5); }

  // Composition f(g) where `outer` holds the Taylor coefficients of f expanded
  // at g(x0).
  friend Jet compose(const Jet& outer, const Jet& g) {
    const int order = std::min(outer.order_, g.order_);
    Jet dg = g;
    dg.c_[0] = 0.0;
    Jet out = Jet::constant(outer.c_[outer.order_], order);
    for (int k = outer.order_ - 1; k >= 0; --k) {
      out = out * dg;
      out.c_[0] += outer.c_[k];
    }
    return out.truncated(order);
  }

 private:
  explicit Jet(int order) : order_(order) {
    if (order < 0 || order > kMaxOrder) throw OrderError("jet order out of range");
  }

  int order_ = 0;
  std::array<double, kMaxOrder + 1> c_{};
};

Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet pow(const Jet& a, double p);
Jet sqrt(const Jet& a);
Jet compose(const Jet& outer, const Jet& g);

}  // namespace qcurv
