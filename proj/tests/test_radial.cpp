#include <cmath>
#include <random>

#include "doctest.h"
#include "qcurv/corpus.hpp"
#include "qcurv/curvature.hpp"
#include "qcurv/kernels.hpp"
#include "qcurv/radial.hpp"
#include "qcurv/radial_ops.hpp"

using namespace qcurv;
using doctest::Approx;

namespace {

RadialProfile basis_profile(const Dim& d, const BasisFunction& b, double c = 1.0) {
  if (b.is_log) return RadialProfile::analytic(d, {AnalyticTerm::log(c)}, true);
  return RadialProfile::analytic(d, {AnalyticTerm::power(c, b.power)}, b.power < 0);
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> r(count);
  for (int i = 0; i < count; ++i) r[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return r;
}

}  // namespace

TEST_CASE("Delta powers of monomials and logarithms") {
  const Dim d4 = make_dim(4);
  const auto r2 = RadialProfile::analytic(d4, {AnalyticTerm::power(1.0, 2.0)});
  const auto r4 = RadialProfile::analytic(d4, {AnalyticTerm::power(1.0, 4.0)});
  const auto lg = RadialProfile::analytic(d4, {AnalyticTerm::log(1.0)}, true);
  CHECK(radial_delta_power(r2, 1, 0.0) == Approx(8.0).epsilon(1e-14));
  CHECK(radial_delta_power(r2, 1, 3.0) == Approx(8.0).epsilon(1e-14));
  CHECK(radial_delta_power(r4, 2, 0.0) == Approx(192.0).epsilon(1e-14));
  CHECK(radial_delta_power(r4, 2, 1.3) == Approx(192.0).epsilon(1e-13));
  CHECK(radial_delta_power(lg, 1, 2.0) == Approx(0.5).epsilon(1e-14));
  CHECK(radial_delta_power(r4, 0, 2.0) == Approx(16.0).epsilon(1e-15));
  CHECK(radial_delta_power(r2, 1, 0.01) == Approx(8.0).epsilon(1e-14));

  CHECK_THROWS_AS(radial_delta_power(r4, 3, 1.0), OrderError);
  CHECK_THROWS_AS(radial_delta_power(lg, 1, 0.0), DomainError);
  CHECK_THROWS_AS(radial_delta_power(r2, 1, -1.0), DomainError);
  const auto r3 = RadialProfile::analytic(d4, {AnalyticTerm::power(1.0, 3.0)});
  CHECK_THROWS_AS(radial_delta_power(r3, 1, 0.0), OrderError);
  CHECK(radial_delta_power(r3, 1, 0.5) == Approx(15.0 * 0.5).epsilon(1e-13));
}

TEST_CASE("Delta powers on a sampled profile") {
  const Dim d = make_dim(4);
  const RadialProfile w = w_a_profile(d, -1.0);
  const RadialProfile s = RadialProfile::sample(d, w.as_fn(), sinh_grid(200, 60.0));
  for (double r : {0.0, 0.5, 2.0, 10.0}) {
    CHECK(radial_delta_power(s, 1, r) == Approx(radial_delta_power(w, 1, r)).epsilon(1e-7));
    CHECK(radial_delta_power(s, 2, r) == Approx(radial_delta_power(w, 2, r)).epsilon(1e-5));
  }
  CHECK_THROWS_AS(radial_delta_power(s, 1, 61.0), DomainError);
}

TEST_CASE("polyharmonic basis") {
  const auto b4 = polyharmonic_basis(make_dim(4));
  REQUIRE(b4.size() == 4);
  CHECK(b4[0].label == "1");
  CHECK(b4[1].label == "ln r");
  CHECK(b4[2].label == "r^2");
  CHECK(b4[3].label == "r^-2");
  const auto b2 = polyharmonic_basis(make_dim(2));
  REQUIRE(b2.size() == 2);
  CHECK(b2[1].is_log);

  for (int n : {2, 4, 6, 8}) {
    const Dim d = make_dim(n);
    const auto basis = polyharmonic_basis(d);
    CHECK(basis.size() == static_cast<std::size_t>(n));
    for (const auto& b : basis) {
      const RadialProfile p = basis_profile(d, b);
      for (double r = 0.5; r <= 5.0; r += 0.25) {
        CHECK(std::abs(radial_delta_power(p, d.m, r)) < 1e-9);
      }
      CHECK(b.fn()(1.7) == Approx(b(1.7)).epsilon(1e-15));
    }
  }
}

TEST_CASE("basis decomposition of constructed inputs") {
  const Dim d4 = make_dim(4);
  const auto r = log_spaced(0.2, 20.0, 24);
  std::vector<double> u;
  for (double x : r) u.push_back(3.0 + 2.0 * std::log(x));
  const Decomposition a = basis_decompose(r, u, d4);
  CHECK(a.coefficients[0] == Approx(3.0).epsilon(1e-10));
  CHECK(a.coefficients[1] == Approx(2.0).epsilon(1e-10));
  CHECK(std::abs(a.coefficients[2]) < 1e-10);
  CHECK(std::abs(a.coefficients[3]) < 1e-10);

  u.clear();
  for (double x : r) u.push_back(1.0 / (x * x) - x * x);
  const Decomposition b = basis_decompose(r, u, d4);
  CHECK(b.coefficients[2] == Approx(-1.0).epsilon(1e-10));
  CHECK(b.coefficients[3] == Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(b.coefficients[0]) < 1e-9);
  CHECK(b.residual < 1e-9 * b.norm);

  u.clear();
  for (double x : r) u.push_back(x * x * x);
  CHECK_THROWS_AS(basis_decompose(r, u, d4), NotPolyharmonic);

  CHECK_THROWS_AS(basis_decompose({1, 2, 3}, {1, 2, 3}, d4), DomainError);
  CHECK_THROWS_AS(basis_decompose(log_spaced(1.0, 5.0, 10), std::vector<double>(10, 1.0), d4), DomainError);
}

TEST_CASE("property: decomposition recovers random coefficient vectors") {
  std::mt19937_64 rng(7001);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int n : {2, 4, 6, 8}) {
    const Dim d = make_dim(n);
    const auto basis = polyharmonic_basis(d);
    const auto r = log_spaced(0.3, 6.0, 6 * n);
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<double> c(basis.size());
      for (double& x : c) x = coef(rng);
      std::vector<double> u(r.size(), 0.0);
      for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < c.size(); ++j) u[i] += c[j] * basis[j](r[i]);
      const Decomposition dec = basis_decompose(r, u, d);
      for (std::size_t j = 0; j < c.size(); ++j) CHECK(std::abs(dec.coefficients[j] - c[j]) < 1e-8);
    }
  }
}

TEST_CASE("asymptotic exponents") {
  const Dim d = make_dim(4);
  for (double a : {-2.0, -1.0, -0.3, 0.0, 0.8}) {
    const ExponentEstimate e = asymptotic_exponent(w_a_profile(d, a), EndLocation::Infinity);
    CHECK(e.c1 == Approx(a).epsilon(1e-10));
    CHECK(e.lo <= e.c1);
    CHECK(e.hi >= e.c1);
  }
  CHECK(std::abs(asymptotic_exponent(w_a_profile(d, -1.0), EndLocation::Origin).c1) < 1e-10);
  CHECK(asymptotic_exponent(cylinder_profile(d), EndLocation::Origin).c1 == Approx(-1.0).epsilon(1e-14));
  CHECK(asymptotic_exponent(cylinder_profile(d), EndLocation::Infinity).c1 == Approx(-1.0).epsilon(1e-14));

  const auto grows = RadialProfile::analytic(d, {AnalyticTerm::power(0.1, 2.0)});
  CHECK_THROWS_AS(asymptotic_exponent(grows, EndLocation::Infinity), LimitError);

  const RadialProfile s = RadialProfile::sample(d, w_a_profile(d, -1.0).as_fn(), sinh_grid(240, 2000.0));
  CHECK(asymptotic_exponent(s, EndLocation::Infinity).c1 == Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("property: exponents agree with analytic log coefficients on the corpus") {
  for (int n : {2, 4, 6, 8}) {
    const Dim d = make_dim(n);
    for (const auto& e : profile_corpus(d)) {
      CAPTURE(e.name);
      const double at_inf = e.profile.analytic_log_coefficient_at_infinity();
      CHECK(std::abs(asymptotic_exponent(e.profile, EndLocation::Infinity).c1 - at_inf) < 1e-4);
      const double at_zero = e.profile.analytic_log_coefficient_at_origin();
      CHECK(std::abs(asymptotic_exponent(e.profile, EndLocation::Origin).c1 - at_zero) < 1e-4);
    }
  }
}

TEST_CASE("completeness classification") {
  const Dim d = make_dim(4);
  const CompletenessReport flat = completeness_check(flat_profile(d), EndLocation::Infinity);
  CHECK(flat.verdict == Completeness::Complete);
  CHECK_FALSE(flat.borderline);

  const CompletenessReport border = completeness_check(w_a_profile(d, -1.0), EndLocation::Infinity);
  CHECK(border.borderline);
  CHECK(border.verdict == Completeness::BorderlineResolved);
  CHECK(border.decay_exponent == Approx(0.0).epsilon(1e-6));
  CHECK(border.shells_to_threshold >= 0);

  CHECK(completeness_check(round_sphere_profile(d), EndLocation::Infinity).verdict == Completeness::Incomplete);
  CHECK(completeness_check(w_a_profile(d, -1.5), EndLocation::Infinity).verdict == Completeness::Incomplete);
  CHECK(completeness_check(w_a_profile(d, -0.5), EndLocation::Infinity).verdict == Completeness::Complete);

  const CompletenessReport cyl0 = completeness_check(cylinder_profile(d), EndLocation::Origin);
  CHECK(cyl0.borderline);
  CHECK(cyl0.verdict == Completeness::BorderlineResolved);
  CHECK(completeness_check(cylinder_profile(d), EndLocation::Infinity).verdict ==
        Completeness::BorderlineResolved);

  const auto deep = RadialProfile::analytic(d, {AnalyticTerm::log(-1.5)}, true);
  CHECK(completeness_check(deep, EndLocation::Origin).verdict == Completeness::Complete);
  const auto shallow = RadialProfile::analytic(d, {AnalyticTerm::log(-0.5)}, true);
  CHECK(completeness_check(shallow, EndLocation::Origin).verdict == Completeness::Incomplete);

  CHECK_THROWS_AS(completeness_check(flat_profile(d), EndLocation::Origin), DomainError);
  const auto grows = RadialProfile::analytic(d, {AnalyticTerm::power(0.1, 2.0)});
  CHECK_THROWS_AS(completeness_check(grows, EndLocation::Infinity), LimitError);

  const EndSpec end = make_end("cyl", EndLocation::Origin, cylinder_profile(d));
  CHECK(end.c1 == Approx(-1.0));
  CHECK(end.completeness == Completeness::BorderlineResolved);
}

TEST_CASE("borderline resolution near the critical exponent") {
  const Dim d = make_dim(4);
  // Slightly above -1 the integral diverges; slightly below it converges
  // to a value above the threshold, and well below it stays small.
  const CompletenessReport above = completeness_check(w_a_profile(d, -0.9995), EndLocation::Infinity);
  CHECK(above.borderline);
  CHECK(above.verdict == Completeness::BorderlineResolved);
  CHECK(above.decay_exponent < 1.0);
  const CompletenessReport below = completeness_check(w_a_profile(d, -1.0009), EndLocation::Infinity);
  CHECK(below.borderline);
  CHECK(below.projected_sum > 0.0);
}

TEST_CASE("equality case: bounded r e^w") {
  const Dim d = make_dim(4);
  CHECK(equality_case_check(w_a_profile(d, -1.0)));
  CHECK_FALSE(equality_case_check(flat_profile(d)));
  CHECK(equality_case_check(cylinder_profile(d), EndLocation::Origin));
  CHECK(equality_case_check(round_sphere_profile(d)));
  CHECK_FALSE(equality_case_check(w_a_profile(d, -0.99)));
  const auto deep = RadialProfile::analytic(d, {AnalyticTerm::log(-2.0)}, true);
  CHECK_FALSE(equality_case_check(deep, EndLocation::Origin));
  const RadialProfile s = RadialProfile::sample(d, w_a_profile(d, -1.0).as_fn(), sinh_grid(200, 1000.0));
  CHECK(equality_case_check(s));
}

TEST_CASE("property: scalar curvature sign matches the gate") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> coef(-1.5, 1.5), rho(0.5, 2.0), rr(0.0, 12.0);
  std::uniform_int_distribution<int> count(1, 3);
  for (int n : {2, 4, 6, 8}) {
    const Dim d = make_dim(n);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<AnalyticTerm> terms;
      for (int i = count(rng); i > 0; --i) terms.push_back(AnalyticTerm::log1p_sq(coef(rng), rho(rng)));
      const auto p = RadialProfile::analytic(d, terms);
      for (int k = 0; k < 10; ++k) {
        const double r = rr(rng);
        const double gate = scalar_sign_gate(p, r);
        const double R = scalar_curvature(p, r);
        if (std::abs(gate) < 1e-12) continue;
        CHECK((R >= 0.0) == (gate <= 0.0));
      }
    }
  }
}

TEST_CASE("a smooth profile is its own Green's potential plus a constant") {
  const Dim d = make_dim(4);
  QuadratureSpec q;
  q.radial_nodes = 100;
  q.r_max = 40.0;
  for (const auto& e : profile_corpus(d)) {
    if (e.name != "w_a(-1)" && e.name != "mix" && e.name != "three_term") continue;
    CAPTURE(e.name);
    const RadialFn f = laplacian_power_fn(e.profile.as_fn(), d.n, d.m);
    const GreensSolution sol = greens_solve(f, d, q);
    const auto r = log_spaced(0.5, 20.0, 24);
    std::vector<double> u;
    for (double x : r) u.push_back(e.profile.eval(x) - sol.v.eval(x));
    const Decomposition dec = basis_decompose(r, u, d, 1e-6, 1e-8 * std::sqrt(static_cast<double>(r.size())));
    CHECK(std::abs(dec.coefficients[0] - e.profile.eval(0.0)) < 1e-6);
    for (std::size_t j = 1; j < dec.coefficients.size(); ++j) CHECK(std::abs(dec.coefficients[j]) < 1e-4);
  }
}
