#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qcurv/kernels.hpp"
#include "qcurv/quadrature.hpp"
#include "qcurv/radial_ops.hpp"

using namespace qcurv;
using doctest::Approx;

namespace {

// exp(1 - 1/(1 - r^2)) on r < 1, zero outside.
RadialFn bump(double scale) {
  RadialFn f;
  f.eval = [scale](const Jet& r) {
    if (r.value() >= 1.0) return Jet::constant(0.0, r.order());
    return scale * exp(1.0 - 1.0 / (1.0 - r * r));
  };
  return f;
}

double bump_mass(const Dim& d) {
  const RadialFn b = bump(1.0);
  auto h = [&](double s) { return s < 1.0 ? b(s) * std::pow(s, d.n - 1) : 0.0; };
  return d.c_n * d.sphere_volume * integrate(h, 0.0, 1.0).value;
}

}  // namespace

TEST_CASE("sphere means of simple angle functions") {
  for (int n : {2, 4, 6, 8}) {
    const Dim d = make_dim(n);
    CHECK(sphere_mean([](double) { return 1.0; }, d) == Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(sphere_mean([](double t) { return std::cos(t); }, d)) < 1e-14);
    CHECK(sphere_mean([](double t) { return std::cos(t) * std::cos(t); }, d) == Approx(1.0 / n).epsilon(1e-13));
  }
}

TEST_CASE("II: value at s = 0, symmetry and the four-dimensional closed form") {
  for (int n : {2, 4, 6, 8}) {
    const Dim d = make_dim(n);
    for (double r : {0.3, 1.0, 7.0}) CHECK(kernel_II(r, 0.0, d) == Approx(1.0 / (r * r)).epsilon(1e-15));
    CHECK(kernel_II(2.0, 3.0, d) == Approx(kernel_II(3.0, 2.0, d)).epsilon(1e-12));
  }
  const Dim d4 = make_dim(4);
  double worst = 0.0;
  for (int i = 0; i < 25; ++i)
    for (int j = 0; j < 25; ++j) {
      const double r = 0.1 * std::pow(1.25, i), s = 0.11 * std::pow(1.25, j);
      worst = std::max(worst, std::abs(kernel_II(r, s, d4) * std::pow(std::max(r, s), 2) - 1.0));
    }
  CHECK(worst < 1e-8);
  // Two dimensions: the mean of |x - y|^{-2} is 1/|r^2 - s^2|.
  CHECK(kernel_II(1.0, 3.0, make_dim(2)) == Approx(0.125).epsilon(1e-12));
  CHECK_THROWS_AS(kernel_II(0.0, 0.0, d4), DomainError);
  CHECK_THROWS_AS(kernel_II(-1.0, 1.0, d4), DomainError);
}

TEST_CASE("kernel values against an independent high-precision oracle") {
  struct Row {
    int n;
    double r, s, II, G, L;
  };
  // mpmath quadrature at 30 digits.
  const Row rows[] = {
      {4, 1.7, 0.4, 0.34602076124567477, 0.97231833910034598, -1.4607598133861524},
      {6, 1.0, 0.5, 0.91666666666666667, 0.84375, -0.77387634722661198},
      {6, 2.0, 3.0, 0.094650205761316872, 0.26337448559670782, -0.13991769547325103},
      {6, 1.7, 0.4, 0.3396351416609795, 0.96360196836723694, -1.4652457111444008},
      {8, 1.0, 0.5, 0.88125, 0.83046875, -0.78233988889327864},
      {8, 0.5, 1.0, 0.88125, 0.16953125, -0.089192708333333333},
      {8, 1.7, 0.4, 0.3365483906022185, 0.95938855317202817, -1.4674517604224647},
  };
  for (const Row& row : rows) {
    const Dim d = make_dim(row.n);
    CHECK(kernel_II(row.r, row.s, d) == Approx(row.II).epsilon(1e-12));
    CHECK(kernel_G(row.r, row.s, d) == Approx(row.G).epsilon(1e-12));
    CHECK(kernel_log(row.r, row.s, d) == Approx(row.L).epsilon(1e-12));
  }
}

TEST_CASE("G: boundary values, closed form and its identity with II") {
  const Dim d4 = make_dim(4);
  for (double r : {0.2, 1.0, 5.0}) CHECK(kernel_G(r, 0.0, d4) == 1.0);
  CHECK(kernel_G(2.0, 1.0, d4) == Approx(1.0 - 1.0 / 8.0).epsilon(1e-12));
  CHECK(kernel_G(1.0, 2.0, d4) == Approx(1.0 / 8.0).epsilon(1e-12));
  for (int n : {4, 6, 8}) CHECK(kernel_G(1e4, 1.0, make_dim(n)) == Approx(1.0).epsilon(1e-7));

  const std::vector<double> grid{0.0, 0.15, 0.5, 0.9, 1.1, 2.0, 4.5, 10.0};
  for (int n : {2, 4, 6, 8}) {
    const Dim d = make_dim(n);
    std::vector<double> rs(grid.begin() + 1, grid.end());
    std::vector<double> ss = {0.0, 0.13, 0.7, 1.3, 3.1, 7.7};
    const KernelTable t = kernel_table(d, rs, ss);
    double asym = 0.0, ident = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = 0; j < ss.size(); ++j) {
        const double ii = t.at_II(i, j);
        CHECK(ii > 0.0);
        CHECK(std::isfinite(t.at_G(i, j)));
        ident = std::max(ident, std::abs(t.at_G(i, j) - 0.5 - 0.5 * (rs[i] * rs[i] - ss[j] * ss[j]) * ii));
        if (ss[j] > 0.0) asym = std::max(asym, std::abs(ii - kernel_II(ss[j], rs[i], d)));
      }
    CHECK(asym < 1e-5);
    CHECK(ident < 1e-5);
  }
}

TEST_CASE("log kernel: origin value, two-dimensional form, radial derivative") {
  for (int n : {2, 4, 6, 8}) CHECK(kernel_log(0.0, 2.5, make_dim(n)) == 0.0);
  const Dim d2 = make_dim(2);
  for (double r : {0.3, 0.999, 1.001, 3.0, 20.0})
    CHECK(kernel_log(r, 1.0, d2) == Approx(std::min(0.0, std::log(1.0 / r))).epsilon(1e-10));
  // The singular diagonal is integrable.
  for (int n : {2, 4, 6, 8}) CHECK(std::isfinite(kernel_log(1.0, 1.0, make_dim(n))));

  for (int n : {4, 6, 8}) {
    const Dim d = make_dim(n);
    for (double r : {0.4, 1.6, 3.0})
      for (double s : {0.5, 2.0}) {
        const double h = 1e-4 * r;
        const double dl = (kernel_log(r + h, s, d) - kernel_log(r - h, s, d)) / (2.0 * h);
        CHECK(std::abs(r * dl + kernel_G(r, s, d)) < 1e-5);
      }
  }
  CHECK_THROWS_AS(kernel_log(1.0, 0.0, d2), DomainError);
}

TEST_CASE("polynomial structure of r^2 II") {
  const std::vector<double> r{0.5, 1.0, 2.0, 4.0, 8.0};
  const std::vector<double> s{0.1, 0.3, 0.7, 1.5, 3.0, 5.0, 9.0};

  const KernelStructureReport r4 = verify_kernel_structure(make_dim(4), r, s);
  CHECK(r4.residual < 1e-8);
  REQUIRE(r4.poly.size() == 1);
  CHECK(std::abs(r4.poly[0]) < 1e-8);
  CHECK(r4.C_outer == Approx(1.0).epsilon(1e-8));

  const KernelStructureReport r6 = verify_kernel_structure(make_dim(6), r, s);
  CHECK(r6.residual < 1e-6);
  REQUIRE(r6.poly.size() == 2);
  CHECK(r6.poly[0] == Approx(-1.0 / 3.0).epsilon(1e-8));
  CHECK(std::abs(r6.poly[1]) < 1e-8);
  CHECK(r6.C > 0.0);

  const KernelStructureReport r8 = verify_kernel_structure(make_dim(8), r, s);
  CHECK(r8.residual < 1e-6);
  REQUIRE(r8.poly.size() == 3);

  // Two dimensions: r^2 II = 1 / (1 - s^2/r^2) is not 1 + (no polynomial).
  const KernelStructureReport r2 = verify_kernel_structure(make_dim(2), r, s);
  CHECK(r2.degenerate);
  CHECK(r2.poly.empty());
  CHECK(r2.residual > 1e-2);

  CHECK_THROWS_AS(verify_kernel_structure(make_dim(4), {1.0}, {1.0}), DomainError);
}

TEST_CASE("Green's solver: zero source and a bump") {
  const Dim d4 = make_dim(4);
  QuadratureSpec q;
  q.radial_nodes = 48;
  q.r_max = 10.0;
  const GreensSolution zero = greens_solve([] {
    RadialFn z;
    z.eval = [](const Jet& r) { return Jet::constant(0.0, r.order()); };
    return z;
  }(), d4, q);
  for (double v : zero.values) CHECK(v == 0.0);

  for (int n : {4, 6}) {
    const Dim d = make_dim(n);
    const RadialFn f = bump(1.0 / bump_mass(d));
    q.radial_nodes = 128;
    const GreensSolution sol = greens_solve(f, d, q);
    CHECK(std::abs(sol.v.eval(0.0)) < 1e-14);
    CHECK(sol.tail_bound == 0.0);
    CHECK(sol.max_residual < 1e-4);
    const RvDotLimits lim = rv_dot_limits(f, d, q);
    CHECK(std::abs(lim.at_zero) < 1e-6);
    CHECK(lim.at_infinity == Approx(-1.0).epsilon(1e-6));
  }
}

TEST_CASE("Green's solver reproduces w_a up to its value at the origin") {
  const Dim d = make_dim(4);
  const RadialProfile w = w_a_profile(d, -1.0);
  const RadialFn f = laplacian_power_fn(w.as_fn(), d.n, d.m);
  QuadratureSpec q;
  q.radial_nodes = 120;
  q.r_max = 50.0;
  const GreensSolution sol = greens_solve(f, d, q);
  double err = 0.0;
  for (double r = 0.0; r <= q.r_max; r += 0.137) err = std::max(err, std::abs(sol.v.eval(r) - w.eval(r)));
  CHECK(err < 10.0 * q.eps);
  CHECK(err < 1e-9);
  CHECK(sol.max_residual < 1e-4);

  const RvDotLimits lim = rv_dot_limits(f, d, q);
  CHECK(std::abs(lim.at_zero) < 1e-8);
  CHECK(lim.at_infinity == Approx(-1.0).epsilon(1e-7));

  // The Green bound suprema settle: halving the window does not change them.
  const GreensBounds full = greens_sups(sol, q.r_max);
  const GreensBounds half = greens_sups(sol, 0.5 * q.r_max);
  CHECK(full.sup_r_vdot == Approx(1.0).epsilon(1e-3));
  CHECK(full.sup_r2_lap < 10.0);
  CHECK(full.sup_r_vdot == Approx(half.sup_r_vdot).epsilon(1e-3));
  CHECK(full.sup_r2_lap == Approx(half.sup_r2_lap).epsilon(1e-3));
}

TEST_CASE("non-integrable sources are rejected") {
  const Dim d = make_dim(4);
  RadialFn f;
  f.eval = [](const Jet& r) { return 1.0 / (1.0 + r * r); };
  CHECK_THROWS_AS(greens_solve(f, d, QuadratureSpec{}), IntegrabilityError);
}

TEST_CASE("property: II symmetry and the G identity on random pairs") {
  std::mt19937_64 rng(20261018);
  std::uniform_real_distribution<double> logr(-2.0, 2.5);
  for (int n : {4, 6, 8}) {
    const Dim d = make_dim(n);
    for (int k = 0; k < 40; ++k) {
      const double r = std::exp(logr(rng)), s = std::exp(logr(rng));
      const double ii = kernel_II(r, s, d);
      CHECK(std::abs(ii - kernel_II(s, r, d)) <= 1e-9 * ii);
      CHECK(std::abs(kernel_G(r, s, d) - 0.5 - 0.5 * (r * r - s * s) * ii) < 1e-9 * (1.0 + r * r * ii));
      if (s < r) CHECK(std::abs(r * r * ii - 1.0) <= 2.0 * (s * s) / (r * r));
    }
  }
}
