#include "qcurv/suite.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>
#include <random>

#include "qcurv/averaging.hpp"
#include "qcurv/corpus.hpp"
#include "qcurv/curvature.hpp"
#include "qcurv/error.hpp"
#include "qcurv/gbc.hpp"
#include "qcurv/kernels.hpp"
#include "qcurv/radial.hpp"
#include "qcurv/radial_ops.hpp"

namespace qcurv {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Collects the first failure and the reported metrics of one criterion.
struct Ledger {
  bool ok = true;
  std::string first;
  std::vector<std::pair<std::string, double>> metrics;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      first = what;
    }
  }
  void metric(std::string key, double v) { metrics.emplace_back(std::move(key), v); }
};

RadialFn gaussian() {
  RadialFn f;
  f.eval = [](const Jet& r) { return exp(-1.0 * r * r); };
  return f;
}

double delta2_gaussian(double r) {
  const double r2 = r * r;
  return (16 * r2 * r2 - 96 * r2 + 96) * std::exp(-r2);
}

RadialProfile random_mix(std::mt19937_64& rng, const Dim& d) {
  std::uniform_real_distribution<double> coef(-1.5, 1.5), rho(0.5, 2.0);
  std::uniform_int_distribution<int> count(1, 3);
  std::vector<AnalyticTerm> terms;
  for (int i = count(rng); i > 0; --i) terms.push_back(AnalyticTerm::log1p_sq(coef(rng), rho(rng)));
  return RadialProfile::analytic(d, terms);
}

RadialFn lambda_power(int k) {
  RadialFn f;
  f.eval = [k](const Jet& l) {
    Jet out = Jet::constant(1.0, l.order());
    for (int i = 0; i < k; ++i) out = out * l;
    return out;
  };
  return f;
}

// ---- criteria ----

void constants(Ledger& L, const SuiteOptions&) {
  const double c2 = make_dim(2).c_n, c4 = make_dim(4).c_n;
  const double e2 = std::abs(c2 * 2.0 * kPi - 1.0), e4 = std::abs(c4 * 8.0 * kPi * kPi - 1.0);
  L.metric("c_2", c2);
  L.metric("c_4", c4);
  L.expect(e2 < 1e-12, fmt("c_2 relative error %.3g", e2));
  L.expect(e4 < 1e-12, fmt("c_4 relative error %.3g", e4));
}

void round_sphere(Ledger& L, const SuiteOptions&) {
  const TotalQ t = total_q_routes(round_sphere_profile(make_dim(4)));
  L.metric("flux", t.flux);
  L.metric("quadrature", t.quadrature);
  L.expect(std::abs(t.flux - 2.0) < 1e-3, fmt("flux total %.12g", t.flux));
  L.expect(std::abs(t.quadrature - 2.0) < 1e-3, fmt("quadrature total %.12g", t.quadrature));
  L.expect(std::abs(t.flux - t.quadrature) < 1e-3, "flux and quadrature routes disagree");
}

void gbc_family(Ledger& L, const SuiteOptions&) {
  const Dim d = make_dim(4);
  double worst = 0.0;
  for (double a : {-1.0, -0.75, -0.5, -0.25, 0.0}) {
    const RadialProfile w = w_a_profile(d, a);
    const double total = total_q(w);
    worst = std::max(worst, std::abs(total + a));
    L.expect(std::abs(total + a) < 1e-3, fmt("total_q(w_a) at a = %g is %.12g", a, total));
    const GBCReport r = verify_gbc_rn(w);
    L.expect(r.verdict == Verdict::Satisfied, fmt("verdict at a = %g is not satisfied", a));
    const bool at_equality = a == -1.0;
    L.expect(r.equality_expected == at_equality && r.equality_observed == at_equality,
             fmt("equality flags wrong at a = %g", a));
  }
  L.metric("max_abs_error", worst);
}

void sweep(Ledger& L, const SuiteOptions& opt) {
  const SweepReport s = gbc_sweep(make_dim(4), 200, opt.seed);
  L.metric("profiles", s.profiles);
  L.metric("max_total", s.max_total);
  L.metric("violations", s.violations);
  L.metric("hypothesis_failures", s.hypothesis_failures);
  L.expect(s.profiles == 200, "fewer than 200 profiles");
  L.expect(s.violations == 0, fmt("%g violations", s.violations));
  L.expect(s.max_total <= 1.0 + kGbcTolerance, fmt("max total %.12g", s.max_total));
}

void multi_end(Ledger& L, const SuiteOptions&) {
  const Dim d = make_dim(4);
  const RadialProfile cyl = cylinder_profile(d);
  const GBCReport r = multi_end_total(
      {make_end("infinity", EndLocation::Infinity, cyl), make_end("origin", EndLocation::Origin, cyl)},
      {{0.0, 2.0, 4.0}, {0.0, 0.5, 1.0}}, cyl);
  L.metric("total", r.total);
  L.metric("bound", r.bound);
  L.expect(r.bound == 0.0, fmt("bound %g", r.bound));
  L.expect(std::abs(r.total) < 1e-3, fmt("total %.12g", r.total));
  L.expect(r.equality_expected && r.equality_observed, "equality not detected");
}

void kernel_structure(Ledger& L, const SuiteOptions&) {
  const Dim d4 = make_dim(4);
  const auto r = geometric_grid(30, 0.1, 10.0), s = geometric_grid(30, 0.105, 10.5);
  const KernelTable t = kernel_table(d4, r, s);
  double worst = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double m = std::max(r[i], s[j]);
      worst = std::max(worst, std::abs(t.at_II(i, j) - 1.0 / (m * m)));
    }
  L.metric("max_II_error_n4", worst);
  L.expect(worst < 1e-6, fmt("|II - 1/max(r,s)^2| = %.3g", worst));

  const std::vector<double> lr{0.5, 1.0, 2.0, 4.0, 8.0};
  const std::vector<double> ls{0.1, 0.3, 0.7, 1.5, 3.0, 5.0, 9.0};
  for (int n : {2, 4, 6}) {
    const KernelStructureReport rep = verify_kernel_structure(make_dim(n), lr, ls);
    L.metric("kernel_structure_residual_n" + std::to_string(n), rep.residual);
    if (n == 2)
      L.expect(rep.degenerate && rep.poly.empty(), "n = 2 not reported as the degenerate case");
    else
      L.expect(rep.residual < 1e-6, fmt("kernel structure residual %.3g at n = %g", rep.residual, n));
  }

  const RadialProfile w = w_a_profile(d4, -1.0);
  const RadialFn f = laplacian_power_fn(w.as_fn(), d4.n, d4.m);
  QuadratureSpec q;
  q.radial_nodes = 100;
  q.r_max = 25.0;
  const GreensBounds a = greens_sups(greens_solve(f, d4, q), q.r_max);
  q.r_max = 50.0;
  q.radial_nodes = 120;
  const GreensBounds b = greens_sups(greens_solve(f, d4, q), q.r_max);
  L.metric("sup_r_vdot_R25", a.sup_r_vdot);
  L.metric("sup_r_vdot_R50", b.sup_r_vdot);
  L.metric("sup_r2_lap_R25", a.sup_r2_lap);
  L.metric("sup_r2_lap_R50", b.sup_r2_lap);
  const bool finite = std::isfinite(a.sup_r_vdot) && std::isfinite(b.sup_r_vdot) && std::isfinite(a.sup_r2_lap) &&
                      std::isfinite(b.sup_r2_lap);
  L.expect(finite, "Green bound suprema not finite");
  L.expect(std::abs(b.sup_r_vdot - a.sup_r_vdot) <= 1e-2 * a.sup_r_vdot &&
               std::abs(b.sup_r2_lap - a.sup_r2_lap) <= 1e-2 * a.sup_r2_lap,
           "Green bound suprema move under doubling R_max");
}

void greens(Ledger& L, const SuiteOptions&) {
  const Dim d = make_dim(4);
  QuadratureSpec q;
  q.eps = 1e-5;
  q.radial_nodes = 120;
  q.r_max = 50.0;
  for (double a : {-1.0, -0.5}) {
    const RadialProfile w = w_a_profile(d, a);
    const RadialFn f = laplacian_power_fn(w.as_fn(), d.n, d.m);
    const GreensSolution sol = greens_solve(f, d, q);
    double err = 0.0;
    for (double r = 0.0; r <= q.r_max; r += 0.137) err = std::max(err, std::abs(sol.v.eval(r) - w.eval(r)));
    L.metric(fmt("sup_error_a%g", a), err);
    L.expect(err < 10 * q.eps, fmt("sup |v - (w_a - w_a(0))| = %.3g at a = %g", err, a));
    const RvDotLimits lim = rv_dot_limits(f, d, q);
    L.metric(fmt("rv_inf_a%g", a), lim.at_infinity);
    L.expect(std::abs(lim.at_zero) < 1e-3, fmt("r v' at 0 = %.3g", lim.at_zero));
    L.expect(std::abs(lim.at_infinity - a) < 1e-3, fmt("r v' at infinity = %.6g for a = %g", lim.at_infinity, a));
  }
}

void curvature_consistency(Ledger& L, const SuiteOptions& opt) {
  const Dim d = make_dim(4);
  std::vector<RadialProfile> profiles;
  for (const auto& e : profile_corpus(d)) profiles.push_back(e.profile);
  std::mt19937_64 rng(opt.seed);
  for (int i = 0; i < 20; ++i) profiles.push_back(random_mix(rng, d));

  double q_worst = 0.0, pan_worst = 0.0, sig_worst = 0.0, pf_worst = 0.0;
  for (const auto& p : profiles) {
    const double start = p.punctured_origin() ? 0.1 : 0.0;
    for (double r = start; r <= 10.0; r += 0.37) {
      const double a = q4_general(p, r), b = q_curvature_lcf(p, r);
      const double e = std::abs(b) > 1e-3 ? std::abs(a - b) / std::abs(b) : std::abs(a - b);
      q_worst = std::max(q_worst, std::abs(b) > 1e-3 ? e / 1e-5 : e / 1e-6);
      L.expect(std::abs(b) > 1e-3 ? e < 1e-5 : e < 1e-6, fmt("q4_general vs LCF Q at r = %g: %.3g", r, e));

      const CurvatureFrame fr = curvature_frame(p, r);
      const double sj = std::abs(fr.sigma[0] - fr.J);
      sig_worst = std::max(sig_worst, sj / (std::abs(fr.J) + 1e-12));
      L.expect(sj <= 1e-9 * std::abs(fr.J) + 1e-15, fmt("sigma_1 - J = %.3g at r = %g", sj, r));
      const double scale = 1.0 + std::abs(fr.sigma[1]);
      const double e1 = std::abs(pfaffian(fr, p, PfaffianRoute::Faf1) - fr.pfaff_sigma) / scale;
      const double e2 = std::abs(fr.pfaff_div4 - fr.pfaff_sigma) / scale;
      pf_worst = std::max({pf_worst, e1, e2});
      L.expect(e1 < 1e-5 && e2 < 1e-5, fmt("Pfaffian routes differ by %.3g at r = %g", std::max(e1, e2), r));
    }
    if (p.punctured_origin()) continue;
    for (double r = 0.1; r <= 3.0; r += 0.29) {
      const double want = std::exp(-4 * p.eval(r)) * delta2_gaussian(r);
      const double e = std::abs(paneitz_apply(gaussian(), p, r) - want) / (std::abs(want) + 1e-8);
      pan_worst = std::max(pan_worst, e);
      L.expect(e < 1e-5, fmt("Paneitz relative error %.3g at r = %g", e, r));
    }
  }
  const Calibration& c = calibration(d);
  L.metric("q4_vs_lcf_worst_over_tol", q_worst);
  L.metric("paneitz_rel_worst", pan_worst);
  L.metric("sigma1_vs_J_rel_worst", sig_worst);
  L.metric("pfaffian_route_worst", pf_worst);
  L.metric("kappa_4_over_C4", c.ratio_sigma_vs_printed);
  L.metric("div4_calib", c.div4_calib);
  L.metric("kappa_div", c.kappa_div);
}

void averaging(Ledger& L, const SuiteOptions& opt) {
  const QuadratureSpec q;
  double shell_worst = 0.0;
  for (int n : {2, 4, 6, 8}) {
    const Dim d = make_dim(n);
    for (const auto& e : profile_corpus(d)) {
      if (e.profile.punctured_origin()) continue;
      for (int power : {1, 2}) {
        const ShellDefect sd = verify_shell_equality(perturbed_field(e.profile, 0.2, power, false, sinh_grid(220, 24.0), 12));
        shell_worst = std::max(shell_worst, sd.max_defect);
        L.expect(sd.max_defect < 10 * q.eps, fmt("shell defect %.3g at n = %g", sd.max_defect, n));
      }
    }
  }
  L.metric("shell_defect_worst", shell_worst);

  const Dim d = make_dim(4);
  const RadialProfile wm1 = w_a_profile(d, -1.0);
  L.expect(verify_sign_preservation(SphericalField::from_profile(wm1, "radial", sinh_grid(160, 30.0), 8)),
           "sign not preserved for the radial a = -1 field");
  L.expect(verify_sign_preservation(perturbed_field(wm1, 0.01, 2, true, sinh_grid(220, 24.0), 12)),
           "sign not preserved for the perturbed a = -1 field");
  L.expect(verify_sign_preservation(SphericalField::from_profile(flat_profile(d), "flat", sinh_grid(40, 10.0), 8)),
           "sign not preserved for the flat field");
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> a(-2.0, -1.0), eps(-0.02, 0.02);
  int admissible = 0;
  for (int n : {4, 6}) {
    for (int trial = 0; trial < 8; ++trial) {
      const SphericalField f = perturbed_field(w_a_profile(make_dim(n), a(rng)), eps(rng), 2, false, sinh_grid(220, 24.0), 8);
      bool preserved = false;
      try {
        preserved = verify_sign_preservation(f);
      } catch (const PreconditionError&) {
        continue;
      }
      ++admissible;
      L.expect(preserved, fmt("sign not preserved on a random admissible field (n = %g)", n));
    }
  }
  L.metric("sign_inputs_checked", admissible + 3);

  const SphericalField decaying = SphericalField::from_function(d, "decaying", sinh_grid(200, 200.0), 12,
                                                                [&](double r, double t) {
                                                                  const double c = std::cos(t);
                                                                  const double s = 1.0 + r * r;
                                                                  return wm1.eval(r) + 0.5 * r * r * c * c / (s * s);
                                                                });
  const RatioCurve ratio = mean_ratio(decaying);
  L.metric("mean_ratio_tail", ratio.tail);
  L.expect(std::abs(ratio.tail - 1.0) < 1e-3, fmt("mean ratio tail %.9g", ratio.tail));

  std::uniform_real_distribution<double> coef(-0.5, 0.5);
  int constant_cases = 0;
  double worst_coef = 0.0;
  for (int n : {4, 6, 8}) {
    const Dim dn = make_dim(n);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<AnalyticTerm> terms{AnalyticTerm::power(coef(rng), 0.0)};
      if (trial % 4 != 0)
        for (int p = 2; p <= n - 2; p += 2) terms.push_back(AnalyticTerm::power(coef(rng) * std::pow(0.25, p), p));
      const ConstancyReport c = constancy_check(RadialProfile::analytic(dn, terms));
      if (!c.hypotheses_hold) continue;
      ++constant_cases;
      worst_coef = std::max(worst_coef, c.max_nonconstant);
      L.expect(c.constant, fmt("Q = 0, R >= 0 profile not constant (max coefficient %.3g)", c.max_nonconstant));
    }
  }
  L.metric("constancy_cases", constant_cases);
  L.metric("constancy_max_nonconstant", worst_coef);
  L.expect(constant_cases > 0, "no admissible Q = 0 profiles generated");
}

void level_sets(Ledger& L, const SuiteOptions&) {
  const RadialProfile wm1 = w_a_profile(make_dim(4), -1.0);
  double id_worst = 0.0, f_worst = 0.0;
  for (double lam : {0.3, 0.4, 0.5, 0.6, 0.7}) {
    for (int k : {0, 1, 2}) {
      const LevelSetIdentity li = levelset_identity(wm1, lambda_power(k), lam);
      const double rel = li.defect / (1.0 + std::abs(li.lhs));
      id_worst = std::max(id_worst, rel);
      L.expect(rel < 1e-3, fmt("level-set identity defect %.3g at lambda = %g, f = lambda^%g", rel, lam, k));
    }
    const LevelSetFrame f = f_lambda(wm1, lam);
    f_worst = std::max(f_worst, f.defect);
    L.expect(f.defect < 1e-3, fmt("lambda F' vs kappa int sigma_2: defect %.3g at lambda = %g", f.defect, lam));
  }
  L.metric("identity_defect_worst", id_worst);
  L.metric("F_defect_worst", f_worst);
  L.metric("kappa_F", levelset_kappa());
}

void gluing(Ledger& L, const SuiteOptions&) {
  const QuadratureSpec q;
  double worst = 0.0;
  for (int n : {2, 4, 6, 8}) {
    const Dim d = make_dim(n);
    const RadialFn eta = standard_cutoff(d);
    for (const auto& e : profile_corpus(d)) {
      const double g = gluing_invariance(e.profile, eta);
      worst = std::max(worst, g);
      L.expect(g < 10 * q.eps, "gluing defect " + fmt("%.3g", g) + " for " + e.name + fmt(" at n = %g", n));
    }
  }
  L.metric("gluing_defect_worst", worst);
}

struct Criterion {
  const char* name;
  double budget;
  void (*run)(Ledger&, const SuiteOptions&);
};

const Criterion kCriteria[] = {
    {"normalization constants", 1.0, constants},
    {"round-sphere total", 1.0, round_sphere},
    {"w_a family and equality", 5.0, gbc_family},
    {"randomized inequality sweep", 120.0, sweep},
    {"multi-end cylinder", 5.0, multi_end},
    {"kernel structure", 60.0, kernel_structure},
    {"Green's solver", 30.0, greens},
    {"curvature consistency", 30.0, curvature_consistency},
    {"averaging", 60.0, averaging},
    {"level sets", 60.0, level_sets},
    {"gluing", 10.0, gluing},
};

}  // namespace

std::vector<CriterionResult> run_suite(const SuiteOptions& opt,
                                       const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  int id = 0;
  for (const Criterion& c : kCriteria) {
    CriterionResult res;
    res.id = ++id;
    res.name = c.name;
    res.budget_seconds = c.budget;
    Ledger L;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(L, opt);
    } catch (const std::exception& e) {
      L.expect(false, std::string("exception: ") + e.what());
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    L.expect(res.seconds <= c.budget, fmt("took %.1f s, budget %.0f s", res.seconds, c.budget));
    res.pass = L.ok;
    res.detail = L.ok ? "ok" : L.first;
    res.metrics = std::move(L.metrics);
    if (on_result) on_result(res);
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace qcurv
