#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qcurv/averaging.hpp"
#include "qcurv/corpus.hpp"
#include "qcurv/error.hpp"
#include "qcurv/gbc.hpp"

using namespace qcurv;
using doctest::Approx;

namespace {

RadialFn lambda_power(int k) {
  RadialFn f;
  f.eval = [k](const Jet& l) {
    Jet out = Jet::constant(1.0, l.order());
    for (int i = 0; i < k; ++i) out = out * l;
    return out;
  };
  return f;
}

const QuadratureSpec kQuad{};

}  // namespace

TEST_CASE("total Q by flux and by quadrature agree on the corpus") {
  for (int n : {2, 4, 6, 8}) {
    const Dim d = make_dim(n);
    for (const auto& e : profile_corpus(d)) {
      CAPTURE(n);
      CAPTURE(e.name);
      const TotalQ t = total_q_routes(e.profile, kQuad);
      CHECK(std::abs(t.flux - t.quadrature) < 10 * kQuad.eps);
      CHECK(t.value == t.flux);
    }
  }
}

TEST_CASE("total Q of w_a is -a") {
  for (int n : {2, 4, 6, 8}) {
    const Dim d = make_dim(n);
    for (double a : {-1.0, -0.75, -0.5, -0.25, 0.0}) {
      CAPTURE(n);
      CAPTURE(a);
      CHECK(std::abs(total_q(w_a_profile(d, a)) + a) < 1e-3);
    }
  }
}

TEST_CASE("round sphere total is its Euler characteristic") {
  for (int n : {2, 4, 6, 8}) {
    const TotalQ t = total_q_routes(round_sphere_profile(make_dim(n)));
    CHECK(t.flux == Approx(2.0).epsilon(1e-6));
    CHECK(t.quadrature == Approx(2.0).epsilon(1e-6));
  }
}

TEST_CASE("flat metric has zero total") { CHECK(total_q(flat_profile(make_dim(4))) == 0.0); }

TEST_CASE("punctured log terms contribute their coefficient") {
  const Dim d = make_dim(4);
  // ln r has equal fluxes at both ends and drops out; (1/2) ln(1 + r^2) gives -1.
  const RadialProfile p = RadialProfile::analytic(d, {AnalyticTerm::log(-1.5), AnalyticTerm::log1p_sq(0.5, 1.0)}, true);
  CHECK(total_q(p) == Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("verify_gbc_rn on the w_a family") {
  for (int n : {2, 4, 6, 8}) {
    const Dim d = make_dim(n);
    CAPTURE(n);
    const GBCReport eq = verify_gbc_rn(w_a_profile(d, -1.0));
    CHECK(eq.verdict == Verdict::Satisfied);
    CHECK(eq.total == Approx(1.0).epsilon(1e-6));
    CHECK(eq.bound == 1.0);
    CHECK(eq.equality_expected);
    CHECK(eq.equality_observed);

    for (double a : {-0.75, -0.5, -0.25, 0.0}) {
      const GBCReport r = verify_gbc_rn(w_a_profile(d, a));
      CHECK(r.verdict == Verdict::Satisfied);
      CHECK_FALSE(r.equality_expected);
      CHECK_FALSE(r.equality_observed);
    }

    const GBCReport s = verify_gbc_rn(round_sphere_profile(d));
    CHECK(s.verdict == Verdict::HypothesesNotMet);
    CHECK_FALSE(s.flags.complete);
    CHECK(s.total == Approx(2.0).epsilon(1e-6));
  }
}

TEST_CASE("equality observed iff expected on the corpus") {
  for (int n : {2, 4, 6, 8}) {
    const Dim d = make_dim(n);
    for (const auto& e : profile_corpus(d)) {
      if (e.profile.punctured_origin()) continue;
      CAPTURE(n);
      CAPTURE(e.name);
      const GBCReport r = verify_gbc_rn(e.profile);
      CHECK(r.equality_observed == r.equality_expected);
      CHECK(r.verdict != Verdict::Violated);
    }
  }
}

TEST_CASE("verify_gbc_rn rejects punctured profiles") {
  CHECK_THROWS_AS(verify_gbc_rn(cylinder_profile(make_dim(4))), DomainError);
}

TEST_CASE("multi-end totals") {
  const Dim d = make_dim(4);
  const RadialProfile cyl = cylinder_profile(d);

  SUBCASE("global cylinder") {
    const GBCReport r = multi_end_total(
        {make_end("infinity", EndLocation::Infinity, cyl), make_end("origin", EndLocation::Origin, cyl)},
        {{0.0, 2.0, 4.0}, {0.0, 0.5, 1.0}}, cyl);
    CHECK(r.bound == 0.0);
    CHECK(std::abs(r.total) < 1e-8);
    CHECK(r.verdict == Verdict::Satisfied);
    CHECK(r.equality_expected);
    CHECK(r.equality_observed);
    REQUIRE(r.contributions.size() == 3);
    for (const auto& c : r.contributions) CHECK(std::abs(c.flux - c.quadrature) < 10 * kQuad.eps);
  }

  SUBCASE("steep puncture plus w_{-1} at infinity") {
    const RadialProfile wm1 = w_a_profile(d, -1.0);
    const RadialProfile punct = RadialProfile::analytic(d, {AnalyticTerm::log(-2.0)}, true);
    const GBCReport r = multi_end_total(
        {make_end("infinity", EndLocation::Infinity, wm1), make_end("p", EndLocation::Origin, punct)},
        {{0.0, 2.0, 4.0}, {0.0, 0.5, 1.0}}, wm1);
    CHECK(r.total == Approx(-1.0).epsilon(1e-6));
    CHECK(r.bound == 0.0);
    CHECK(r.verdict == Verdict::Satisfied);
    CHECK_FALSE(r.equality_observed);
  }

  SUBCASE("single end reduces to total_q") {
    for (double a : {-1.0, -0.5, 0.0}) {
      const RadialProfile w = w_a_profile(d, a);
      const GBCReport r = multi_end_total({make_end("infinity", EndLocation::Infinity, w)}, {{0.0, 2.0, 4.0}}, w);
      CHECK(r.bound == 1.0);
      CHECK(r.total == Approx(-a).epsilon(1e-6));
    }
  }
}

TEST_CASE("multi-end decomposition errors") {
  const Dim d = make_dim(4);
  const RadialProfile cyl = cylinder_profile(d);
  const EndSpec inf = make_end("infinity", EndLocation::Infinity, cyl);
  const EndSpec org = make_end("origin", EndLocation::Origin, cyl);
  CHECK_THROWS_AS(multi_end_total({inf, org}, {{0.0, 2.0, 4.0}}, cyl), DecompositionError);
  CHECK_THROWS_AS(multi_end_total({inf, org}, {{0.0, 0.5, 4.0}, {0.0, 0.5, 1.0}}, cyl), DecompositionError);
  CHECK_THROWS_AS(multi_end_total({org}, {{0.0, 0.5, 1.0}}, cyl), DecompositionError);
  CHECK_THROWS_AS(multi_end_total({inf, inf}, {{0.0, 2.0, 4.0}, {0.0, 2.0, 4.0}}, cyl), DecompositionError);
  CHECK_THROWS_AS(multi_end_total({inf, org}, {{0.0, 2.0, 4.0}, {0.0, 1.0, 0.5}}, cyl), DecompositionError);
}

TEST_CASE("smooth_step shape") {
  const RadialFn s = smooth_step(1.0, 2.0, 8);
  CHECK(s(0.5) == 0.0);
  CHECK(s(1.0) == 0.0);
  CHECK(s(2.0) == 1.0);
  CHECK(s(3.0) == 1.0);
  CHECK(s(1.5) == Approx(0.5).epsilon(1e-14));
  for (int k = 1; k < 8; ++k) {
    CHECK(std::abs(s(1.0 + 1e-9, k)) < 1e-6);
    CHECK(std::abs(s(2.0 - 1e-9, k)) < 1e-6);
  }
  CHECK_THROWS_AS(smooth_step(2.0, 1.0, 3), DomainError);
}

TEST_CASE("gluing defect vanishes for every corpus end") {
  for (int n : {2, 4, 6, 8}) {
    const Dim d = make_dim(n);
    const RadialFn eta = standard_cutoff(d);
    for (const auto& e : profile_corpus(d)) {
      CAPTURE(n);
      CAPTURE(e.name);
      CHECK(gluing_invariance(e.profile, eta) < 10 * kQuad.eps);
    }
    CHECK(gluing_invariance(cylinder_profile(d), eta) == 0.0);
  }
}

TEST_CASE("gluing rejects cutoffs that are not compactly supported") {
  const Dim d = make_dim(4);
  CHECK_THROWS_AS(gluing_invariance(w_a_profile(d, -1.0), smooth_step(1.0, 2.0, 4)), CutoffError);
  CHECK_THROWS_AS(gluing_invariance(w_a_profile(d, -1.0), constant_fn(1.0)), CutoffError);
}

TEST_CASE("level radius") {
  const Dim d = make_dim(4);
  const RadialProfile wm1 = w_a_profile(d, -1.0);
  const RadialProfile sph = round_sphere_profile(d);
  for (double lam : {0.1, 0.3, 0.5, 0.9}) {
    CHECK(level_radius(wm1, lam) == Approx(std::sqrt(1.0 / (lam * lam) - 1.0)).epsilon(1e-10));
    CHECK(level_radius(sph, lam) == Approx(std::sqrt(2.0 / lam - 1.0)).epsilon(1e-10));
  }
  CHECK(level_radius(wm1, 0.2) > level_radius(wm1, 0.4));
  CHECK_THROWS_AS(level_radius(wm1, 1.5), DomainError);
  CHECK_THROWS_AS(level_radius(wm1, -0.5), DomainError);
  CHECK_THROWS_AS(level_radius(flat_profile(d), 0.5), LevelSetError);
  CHECK_THROWS_AS(level_radius(w_a_profile(make_dim(6), -1.0), 0.5), DimensionError);
}

TEST_CASE("level-set identity on w_{-1}") {
  const RadialProfile wm1 = w_a_profile(make_dim(4), -1.0);
  for (double lam : {0.3, 0.4, 0.5, 0.6, 0.7}) {
    for (int k : {0, 1, 2}) {
      CAPTURE(lam);
      CAPTURE(k);
      const LevelSetIdentity li = levelset_identity(wm1, lambda_power(k), lam);
      CHECK(li.defect < 1e-3 * (1.0 + std::abs(li.lhs)));
      CHECK(li.rhs == Approx(kLevelSetOrientation * li.rhs_printed));
      if (k == 0) {
        CHECK(std::abs(li.lhs) < 1e-8);
        CHECK(std::abs(li.rhs) < 1e-6);
      }
    }
  }
}

TEST_CASE("F(lambda) derivative matches the sigma_2 integral") {
  const RadialProfile wm1 = w_a_profile(make_dim(4), -1.0);
  const double kappa = levelset_kappa();
  CHECK(kappa == Approx(-4.0).epsilon(1e-5));
  for (double lam : {0.3, 0.5, 0.7}) {
    const LevelSetFrame f = f_lambda(wm1, lam);
    CAPTURE(lam);
    CHECK(f.defect < 1e-3);
    CHECK(f.lambda_dF == Approx(kappa * f.sigma2_integral).epsilon(1e-3));
    CHECK(f.radius == Approx(std::sqrt(1.0 / (lam * lam) - 1.0)));
    CHECK(f.volume_g > 0.0);
    CHECK(f.area_g > 0.0);
  }
}

TEST_CASE("cylinder F over truncated annuli") {
  const RadialProfile cyl = cylinder_profile(make_dim(4));
  // sigma_2 vanishes; lambda F' is the constant inner-boundary term -8 pi^2.
  for (double lam : {1.0, 2.0, 5.0}) {
    const LevelSetFrame f = f_lambda(cyl, lam, 0.05);
    CAPTURE(lam);
    CHECK(std::abs(f.sigma2_integral) < 1e-8);
    CHECK(f.lambda_dF == Approx(-8.0 * std::numbers::pi * std::numbers::pi).epsilon(1e-6));
  }
  CHECK_THROWS_AS(f_lambda(cyl, 10.0, 0.5), DomainError);
}

TEST_CASE("F(lambda) on a flat metric") {
  CHECK_THROWS_AS(f_lambda(flat_profile(make_dim(4)), 0.5), LevelSetError);
  CHECK_THROWS_AS(levelset_identity(flat_profile(make_dim(4)), lambda_power(1), 0.5), LevelSetError);
}

TEST_CASE("hypothesis flags") {
  const Dim d = make_dim(4);
  const HypothesisFlags wm1 = check_hypotheses(w_a_profile(d, -1.0), HypothesisMode::BoundedGeometry);
  CHECK(wm1.complete);
  CHECK(wm1.scalar_nonneg);
  CHECK(wm1.q_integrable);
  CHECK(wm1.bounded_geometry_checked);
  CHECK(wm1.bounded_geometry);
  CHECK(wm1.inf_scalar > 0.0);
  CHECK(wm1.sup_scalar == Approx(24.0));

  const HypothesisFlags flat = check_hypotheses(flat_profile(d), HypothesisMode::BoundedGeometry);
  CHECK(flat.scalar_nonneg);
  CHECK_FALSE(flat.bounded_geometry);

  const HypothesisFlags sph = check_hypotheses(round_sphere_profile(d), HypothesisMode::BoundedGeometry);
  CHECK_FALSE(sph.complete);
  CHECK(sph.bounded_geometry);
  CHECK(sph.inf_scalar == Approx(12.0));
  CHECK(sph.sup_scalar == Approx(12.0));
  CHECK_FALSE(sph.all(HypothesisMode::BoundedGeometry));

  // R ~ 1/r at infinity: inf R = 0
  CHECK_FALSE(check_hypotheses(w_a_profile(d, -0.5), HypothesisMode::BoundedGeometry).bounded_geometry);

  const HypothesisFlags a123 = check_hypotheses(w_a_profile(d, -1.0));
  CHECK_FALSE(a123.bounded_geometry_checked);
  CHECK(a123.all());
}

TEST_CASE("negative scalar curvature at infinity fails the scalar-curvature gate") {
  const Dim d = make_dim(4);
  // a > 0: Delta w + |grad w|^2 > 0 for large r
  const HypothesisFlags f = check_hypotheses(w_a_profile(d, 0.5));
  CHECK(f.complete);
  CHECK_FALSE(f.scalar_nonneg);
  CHECK(verify_gbc_rn(w_a_profile(d, 0.5)).verdict == Verdict::HypothesesNotMet);
}

TEST_CASE("random complete profiles never violate the bound") {
  for (int n : {4, 6}) {
    const Dim d = make_dim(n);
    const SweepReport sw = gbc_sweep(d, 200, 20240611);
    CAPTURE(n);
    CHECK(sw.profiles == 200);
    CHECK(sw.violations == 0);
    CHECK(sw.max_total <= 1.0 + kGbcTolerance);
    CHECK(sw.totals.size() == 200);
  }
}

TEST_CASE("random profile generator is deterministic and admissible") {
  const Dim d = make_dim(4);
  const auto a = random_complete_profiles(d, 20, 7);
  const auto b = random_complete_profiles(d, 20, 7);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].terms().size() == b[i].terms().size());
    CHECK(a[i].terms().size() <= 3);
    for (std::size_t j = 0; j < a[i].terms().size(); ++j) {
      CHECK(a[i].terms()[j].c == b[i].terms()[j].c);
      CHECK(std::abs(a[i].terms()[j].c) <= 1.5);
      CHECK(a[i].terms()[j].param >= 0.5);
      CHECK(a[i].terms()[j].param <= 2.0);
    }
    CHECK(a[i].analytic_log_coefficient_at_infinity() >= -1.0 - kBorderlineTolerance);
  }
}

TEST_CASE("property: total Q of random log1p_sq mixes equals minus the log coefficient") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coef(-1.5, 1.5), rho(0.5, 2.0);
  std::uniform_int_distribution<int> count(1, 3);
  for (int trial = 0; trial < 40; ++trial) {
    const Dim d = make_dim(2 * (1 + trial % 4));
    std::vector<AnalyticTerm> terms;
    for (int k = count(rng); k > 0; --k) terms.push_back(AnalyticTerm::log1p_sq(coef(rng), rho(rng)));
    const RadialProfile p = RadialProfile::analytic(d, terms);
    CAPTURE(trial);
    CHECK(total_q(p) == Approx(-p.analytic_log_coefficient_at_infinity()).epsilon(1e-6));
  }
}

TEST_CASE("symmetrization preserves total Q") {
  const Dim d = make_dim(4);
  const RadialProfile base = w_a_profile(d, -1.0);
  const double eps = 0.05;
  const SphericalField field =
      SphericalField::from_function(d, "cos2", sinh_grid(260, 2400.0), 12, [&](double r, double t) {
        const double c = std::cos(t);
        return base.eval(r) + eps * c * c * r * r * std::exp(-0.25 * r * r);
      });
  const RadialProfile wbar = spherical_symmetrize(field);
  const TotalQ t = total_q_routes(wbar);
  CHECK(std::abs(t.flux - total_q(base)) < 10 * kQuad.eps);
}
