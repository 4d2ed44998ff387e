#include <cmath>
#include <random>

#include "doctest.h"
#include "qcurv/averaging.hpp"
#include "qcurv/corpus.hpp"
#include "qcurv/radial.hpp"

using namespace qcurv;
using doctest::Approx;

namespace {

double bump(double s) { return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }

// eps * x_n^2 * bump(r / 3): smooth, compactly supported, mean eps * eta / n.
double cos2_eta(double r) { return r * r * bump(r / 3.0); }
double cos_eta(double r) { return r * bump(r / 3.0); }

// Gaussian envelopes keep the high derivatives moderate.
double cos2_gauss(double r) { return r * r * std::exp(-0.25 * r * r); }
double cos_gauss(double r) { return r * std::exp(-0.25 * r * r); }

SphericalField perturbed(const RadialProfile& base, double eps, int power, int nodes = 12, bool compact = true) {
  return SphericalField::from_function(base.dim(), "perturbed", sinh_grid(220, 24.0), nodes, [=](double r, double t) {
    const double c = std::cos(t);
    const double eta = power == 1 ? (compact ? cos_eta(r) : cos_gauss(r)) : (compact ? cos2_eta(r) : cos2_gauss(r));
    return base.eval(r) + eps * (power == 1 ? c : c * c) * eta;
  });
}

}  // namespace

TEST_CASE("symmetrizing a radial field returns it unchanged") {
  for (int n : {2, 4, 6, 8}) {
    const Dim d = make_dim(n);
    const RadialProfile w = w_a_profile(d, -1.0);
    const SphericalField f = SphericalField::from_profile(w, "radial", sinh_grid(160, 30.0), 10);
    const RadialProfile wbar = spherical_symmetrize(f);
    for (std::size_t i = 0; i < f.r.size(); ++i) CHECK(wbar.samples().w[i] == Approx(w.eval(f.r[i])).epsilon(1e-14));
    const ShellDefect sd = verify_shell_equality(f);
    CHECK(sd.max_defect < 1e-5);
    for (double ratio : mean_ratio(f).ratio) CHECK(ratio == Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("odd and even angular modes under symmetrization") {
  const Dim d = make_dim(4);
  const RadialProfile w = w_a_profile(d, -0.5);
  const SphericalField odd = perturbed(w, 0.3, 1);
  const RadialProfile a = spherical_symmetrize(odd);
  for (std::size_t i = 0; i < odd.r.size(); ++i) CHECK(a.samples().w[i] == Approx(w.eval(odd.r[i])).epsilon(1e-13));

  for (int n : {2, 4, 6, 8}) {
    const Dim dn = make_dim(n);
    const RadialProfile wn = w_a_profile(dn, -0.5);
    const SphericalField even = perturbed(wn, 0.3, 2);
    const RadialProfile b = spherical_symmetrize(even);
    for (std::size_t i = 0; i < even.r.size(); ++i)
      CHECK(b.samples().w[i] == Approx(wn.eval(even.r[i]) + 0.3 * cos2_eta(even.r[i]) / n).epsilon(1e-13));
  }
}

TEST_CASE("shell integrals of Delta^m agree after symmetrization") {
  for (int n : {2, 4, 6, 8}) {
    const Dim d = make_dim(n);
    for (const auto& e : profile_corpus(d)) {
      if (e.profile.punctured_origin()) continue;
      CAPTURE(e.name);
      const ShellDefect sd = verify_shell_equality(perturbed(e.profile, 0.2, 2, 12, false));
      CHECK(sd.max_defect < 1e-4);
      const ShellDefect odd = verify_shell_equality(perturbed(e.profile, 0.2, 1, 12, false));
      CHECK(odd.max_defect < 1e-4);
    }
  }
  const Dim d = make_dim(4);
  const ShellDefect zero = verify_shell_equality(perturbed(w_a_profile(d, -1.0), 0.0, 2));
  CHECK(zero.max_defect < 1e-12);
}

TEST_CASE("under-resolved angular dependence is rejected") {
  const Dim d = make_dim(4);
  const SphericalField f = SphericalField::from_function(d, "sharp", sinh_grid(40, 10.0), 8, [](double r, double t) {
    return std::exp(3.0 * r * r / (1.0 + r * r) * std::cos(t));
  });
  CHECK_THROWS_AS(verify_shell_equality(f), ResolutionError);
}

TEST_CASE("sign preservation") {
  const Dim d = make_dim(4);
  CHECK(verify_sign_preservation(SphericalField::from_profile(w_a_profile(d, -1.0), "a=-1", sinh_grid(160, 30.0), 8)));
  CHECK(verify_sign_preservation(perturbed(w_a_profile(d, -1.0), 0.01, 2)));
  CHECK(verify_sign_preservation(SphericalField::from_profile(flat_profile(d), "flat", sinh_grid(40, 10.0), 8)));
  const SphericalField bad = SphericalField::from_profile(w_a_profile(d, 0.5), "a=1/2", sinh_grid(60, 10.0), 8);
  CHECK_THROWS_AS(verify_sign_preservation(bad), PreconditionError);
}

TEST_CASE("property: symmetrization preserves the gate for random admissible fields") {
  std::mt19937_64 rng(9090);
  std::uniform_real_distribution<double> a(-2.0, -1.0), eps(-0.02, 0.02);
  for (int n : {4, 6}) {
    const Dim d = make_dim(n);
    int checked = 0;
    for (int trial = 0; trial < 8; ++trial) {
      const SphericalField f = perturbed(w_a_profile(d, a(rng)), eps(rng), 2, 8, false);
      bool preserved = false;
      try {
        preserved = verify_sign_preservation(f);
      } catch (const PreconditionError&) {
        continue;
      }
      CHECK(preserved);
      ++checked;
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("ratio of spherical means") {
  const Dim d = make_dim(4);
  const RadialProfile w = w_a_profile(d, -1.0);
  auto make = [&](double shift) {
    return SphericalField::from_function(d, "decaying", sinh_grid(200, 200.0), 12, [&](double r, double t) {
      const double c = std::cos(t);
      return w.eval(r) + shift + 0.5 * r * r * c * c / ((1.0 + r * r) * (1.0 + r * r));
    });
  };
  const RatioCurve base = mean_ratio(make(0.0));
  CHECK(std::abs(base.tail - 1.0) < 1e-3);
  CHECK(base.ratio[base.ratio.size() / 3] > 1.0);
  const RatioCurve shifted = mean_ratio(make(2.5));
  for (std::size_t i = 0; i < base.ratio.size(); ++i) CHECK(shifted.ratio[i] == Approx(base.ratio[i]).epsilon(1e-13));
}

TEST_CASE("constancy probe: w minus its Green's potential has constant spherical means") {
  const Dim d = make_dim(4);
  QuadratureSpec q;
  q.radial_nodes = 100;
  q.r_max = 40.0;
  for (const auto& e : profile_corpus(d)) {
    if (e.name != "w_a(-1)" && e.name != "mix") continue;
    CAPTURE(e.name);
    const ProbeReport rep = constancy_probe(e.profile, q);
    REQUIRE(rep.center.size() == 3);
    CHECK(rep.max_deviation < 1e-4);
  }
  CHECK_THROWS_AS(constancy_probe(cylinder_profile(d), q), DomainError);
}

TEST_CASE("profiles with vanishing Q and nonnegative R are constant") {
  const Dim d4 = make_dim(4);
  const ConstancyReport c = constancy_check(RadialProfile::analytic(d4, {AnalyticTerm::power(0.7, 0.0)}));
  CHECK(c.hypotheses_hold);
  CHECK(c.constant);
  CHECK(c.coefficients[0] == Approx(0.7).epsilon(1e-12));

  const ConstancyReport sq = constancy_check(RadialProfile::analytic(d4, {AnalyticTerm::power(0.3, 2.0)}));
  CHECK(sq.max_abs_q < 1e-8);
  CHECK_FALSE(sq.hypotheses_hold);
  CHECK_FALSE(sq.constant);

  const ConstancyReport sphere = constancy_check(round_sphere_profile(d4));
  CHECK_FALSE(sphere.hypotheses_hold);

  // Smooth polyharmonic candidates: whenever the hypotheses hold, the profile
  // reduces to its constant term.
  std::mt19937_64 rng(1313);
  std::uniform_real_distribution<double> coef(-0.5, 0.5);
  for (int n : {4, 6, 8}) {
    const Dim d = make_dim(n);
    int admissible = 0;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<AnalyticTerm> terms{AnalyticTerm::power(coef(rng), 0.0)};
      if (trial % 4 != 0)
        for (int p = 2; p <= n - 2; p += 2) terms.push_back(AnalyticTerm::power(coef(rng) * std::pow(0.25, p), p));
      const ConstancyReport rep = constancy_check(RadialProfile::analytic(d, terms));
      CHECK(rep.max_abs_q < 1e-8);
      if (rep.hypotheses_hold) {
        ++admissible;
        CHECK(rep.constant);
      }
    }
    CHECK(admissible > 0);
  }
}
