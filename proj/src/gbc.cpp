#include "qcurv/gbc.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <mutex>
#include <random>

#include <Eigen/Eigenvalues>

#include "qcurv/curvature.hpp"
#include "qcurv/parallel.hpp"
#include "qcurv/quadrature.hpp"
#include "qcurv/radial_ops.hpp"

namespace qcurv {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Satisfied: return "satisfied";
    case Verdict::Violated: return "violated";
    case Verdict::HypothesesNotMet: return "hypotheses-not-met";
  }
  return "?";
}

namespace {

constexpr int kLevels = 7;
constexpr double kIntAbs = 1e-10, kIntRel = 1e-11;

double q_sign(const Dim& dim) { return dim.m % 2 == 0 ? 1.0 : -1.0; }

// C_n |S^{n-1}| with the (-1)^m of Q folded in.
double total_factor(const Dim& dim) { return q_sign(dim) * dim.c_n * dim.sphere_volume; }

double delta_m_fn(const RadialFn& u, const Dim& dim, double r) {
  return radial_eval([&](const RadialPoint& pt) { return flat_laplacian_power(u.eval(pt.r), pt, dim.n, dim.m); }, r,
                     u.even_at_origin, 2 * dim.m + 2);
}

std::vector<double> infinity_radii(const RadialProfile& p) {
  double top = 16.0 * std::pow(2.0, kLevels - 1);
  int levels = kLevels;
  if (!p.is_analytic()) {
    top = 0.9 * p.domain_hi();
    levels = std::min(kLevels, static_cast<int>(std::floor(std::log2(top / 4.0))) + 1);
    if (levels < 3) throw LimitError("sampled profile does not reach far enough toward infinity");
  }
  std::vector<double> r;
  for (int k = 0; k < levels; ++k) r.push_back(top * std::pow(2.0, k - levels + 1));
  return r;
}

std::vector<double> origin_radii(const RadialProfile& p) {
  double bottom = std::pow(2.0, -10.0);
  int levels = kLevels;
  if (!p.is_analytic()) {
    bottom = std::max(2.0 * p.domain_lo(), 1e-3);
    levels = std::min(kLevels, static_cast<int>(std::floor(std::log2(0.25 / bottom))) + 1);
    if (levels < 3) throw LimitError("sampled profile does not reach close enough to the origin");
  }
  std::vector<double> r;
  for (int k = 0; k < levels; ++k) r.push_back(bottom * std::pow(2.0, levels - 1 - k));
  return r;
}

// Limit of r^{n-1} (Delta^{m-1} w)' toward the end; corrections are even in 1/r
// (infinity) or in r (origin).
Extrapolation flux_limit(const RadialProfile& p, EndLocation end) {
  const auto radii = end == EndLocation::Infinity ? infinity_radii(p) : origin_radii(p);
  std::vector<double> h, y;
  for (double r : radii) {
    h.push_back(end == EndLocation::Infinity ? 1.0 / (r * r) : r * r);
    y.push_back(radial_flux(p, r));
  }
  return extrapolate_to_zero(h, y);
}

// int_a^infinity Delta^m w r^{n-1} dr.
double tail_integral(const RadialProfile& p, double a) {
  const Dim& dim = p.dim();
  auto h = [&](double r) { return radial_delta_power(p, dim.m, r) * std::pow(r, dim.n - 1); };
  if (p.is_analytic()) return integrate_to_infinity(h, a, std::max(16.0, 2.0 * a), 6, kIntAbs, kIntRel).value;
  std::vector<double> radii;
  for (double r : infinity_radii(p))
    if (r > a) radii.push_back(r);
  if (radii.size() < 3) throw LimitError("sampled profile too short for the tail integral");
  // Panels on the sample grid keep each piece polynomial.
  const auto& grid = p.samples().r;
  auto over_grid = [&](double lo, double hi) {
    std::vector<double> pts{lo};
    for (double r : grid)
      if (r > lo && r < hi) pts.push_back(r);
    pts.push_back(hi);
    return integrate_panels(h, pts, kIntAbs, kIntRel).value;
  };
  std::vector<double> hs, partial;
  double acc = over_grid(a, radii.front());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (k > 0) acc += over_grid(radii[k - 1], radii[k]);
    hs.push_back(1.0 / (radii[k] * radii[k]));
    partial.push_back(acc);
  }
  return extrapolate_to_zero(hs, partial).value;
}

double lower_limit(const RadialProfile& p) { return p.is_analytic() ? 0.0 : p.domain_lo(); }

// r^n |Delta^m w| over one doubling toward the end; below 0.75 (or
// negligible) the tail of int |Q| dv_g is summable.
double tail_decay(const RadialProfile& p, EndLocation end) {
  const Dim& dim = p.dim();
  const auto radii = end == EndLocation::Infinity ? infinity_radii(p) : origin_radii(p);
  const std::size_t k = radii.size() / 2;
  const double r1 = radii[k - 1], r2 = radii[k];
  auto t = [&](double r) { return std::pow(r, dim.n) * std::abs(radial_delta_power(p, dim.m, r)); };
  const double t1 = t(r1), t2 = t(r2);
  if (!std::isfinite(t1) || !std::isfinite(t2)) return std::numeric_limits<double>::infinity();
  if (t2 <= 1e-12 * std::max(1.0, std::abs(radial_flux(p, r2)))) return 0.0;
  return t2 / t1;
}

bool tail_ok(double ratio) { return ratio <= 0.75; }

std::vector<double> log_spaced(double a, double b, int count) {
  std::vector<double> r;
  for (int i = 0; i < count; ++i) r.push_back(a * std::pow(b / a, static_cast<double>(i) / (count - 1)));
  return r;
}

// max of r^2 (Delta w + (m-1) w'^2) near the end.
double end_gate(const RadialProfile& p, EndLocation end, double r_max) {
  std::vector<double> radii;
  if (end == EndLocation::Infinity) {
    const double top = std::min(r_max, p.domain_hi());
    radii = log_spaced(0.5 * top, top, 16);
  } else {
    const double bottom = std::max(1e-3, 2.0 * p.domain_lo());
    radii = log_spaced(bottom, 2.0 * bottom, 16);
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (double r : radii) worst = std::max(worst, r * r * scalar_sign_gate(p, r));
  return worst;
}

constexpr double kGateTolerance = 1e-9;

bool complete_toward(const RadialProfile& p, EndLocation end) {
  try {
    return completeness_check(p, end).verdict != Completeness::Incomplete;
  } catch (const Error&) {
    return false;
  }
}

// Extremes of a sampled quantity over the outermost decade and the decade
// before it; growth or decay between them marks an unbounded sup or a
// vanishing inf.
struct DecadeTrend {
  double last_min, last_max, prev_min, prev_max;
};

DecadeTrend decade_trend(const std::vector<double>& v, std::size_t per_decade) {
  const std::size_t n = v.size();
  DecadeTrend t;
  auto span = [&](std::size_t lo, std::size_t hi, double& mn, double& mx) {
    mn = *std::min_element(v.begin() + lo, v.begin() + hi);
    mx = *std::max_element(v.begin() + lo, v.begin() + hi);
  };
  span(n - per_decade, n, t.last_min, t.last_max);
  span(n - 2 * per_decade, n - per_decade, t.prev_min, t.prev_max);
  return t;
}

constexpr std::size_t kPerDecade = 24;

void scan_bounded_geometry(const RadialProfile& p, HypothesisFlags& f) {
  const Dim& dim = p.dim();
  const double lo = p.punctured_origin() ? std::max(1e-3, 2.0 * p.domain_lo()) : 1e-3;
  const double hi = std::min(1e3, p.is_analytic() ? 1e3 : 0.9 * p.domain_hi());
  const int decades = static_cast<int>(std::floor(std::log10(hi / lo)));
  if (decades < 2) throw LimitError("profile too short for the bounded-geometry scan");
  std::vector<double> radii = log_spaced(lo, lo * std::pow(10.0, decades), decades * static_cast<int>(kPerDecade) + 1);
  if (!p.punctured_origin()) radii.insert(radii.begin(), 0.0);

  std::vector<double> R, grad, ric;
  for (double r : radii) {
    const double w = p.eval(r);
    R.push_back(scalar_curvature(p, r));
    const double slope = radial_eval(
        [&](const RadialPoint& pt) { return scalar_curvature_jet(w_jet(p, pt), pt, dim.n).derivative(); }, r,
        !p.punctured_origin(), 4);
    grad.push_back(std::exp(-w) * std::abs(slope));
    const Eigen::MatrixXd rc = ricci(p, r);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rc, Eigen::EigenvaluesOnly);
    ric.push_back(std::exp(-2.0 * w) * es.eigenvalues().minCoeff());
  }
  f.inf_scalar = *std::min_element(R.begin(), R.end());
  f.sup_scalar = *std::max_element(R.begin(), R.end());
  f.sup_grad_scalar = *std::max_element(grad.begin(), grad.end());
  f.min_ricci = *std::min_element(ric.begin(), ric.end());
  bool ok = std::isfinite(f.inf_scalar) && std::isfinite(f.sup_scalar) && std::isfinite(f.sup_grad_scalar) &&
            std::isfinite(f.min_ricci) && f.inf_scalar > 0.0;

  auto check_end = [&](std::vector<double> r_s, std::vector<double> g_s, std::vector<double> c_s) {
    const DecadeTrend tr = decade_trend(r_s, kPerDecade), tg = decade_trend(g_s, kPerDecade),
                      tc = decade_trend(c_s, kPerDecade);
    const double slack = 1e-3 * (1.0 + std::abs(f.sup_scalar));
    if (tr.last_min < 0.5 * tr.prev_min) ok = false;                  // R decays toward 0
    if (tr.last_max > 2.0 * tr.prev_max + slack) ok = false;          // R grows
    if (tg.last_max > 2.0 * tg.prev_max + slack) ok = false;          // |grad R| grows
    if (tc.last_min < 2.0 * std::min(tc.prev_min, 0.0) - slack) ok = false;  // Ric falls off
  };
  check_end(R, grad, ric);
  if (p.punctured_origin()) {
    auto rev = [](std::vector<double> v) {
      std::reverse(v.begin(), v.end());
      return v;
    };
    check_end(rev(R), rev(grad), rev(ric));
  }
  f.bounded_geometry = ok;
}

}  // namespace

HypothesisFlags check_hypotheses(const RadialProfile& p, HypothesisMode mode, double r_max) {
  HypothesisFlags f;
  f.complete = complete_toward(p, EndLocation::Infinity) &&
         (!p.punctured_origin() || complete_toward(p, EndLocation::Origin));
  try {
    f.worst_gate = end_gate(p, EndLocation::Infinity, r_max);
    if (p.punctured_origin()) f.worst_gate = std::max(f.worst_gate, end_gate(p, EndLocation::Origin, r_max));
    f.scalar_nonneg = f.worst_gate <= kGateTolerance;
  } catch (const Error&) {
    f.scalar_nonneg = false;
  }
  try {
    f.tail_ratio = tail_decay(p, EndLocation::Infinity);
    if (p.punctured_origin()) f.tail_ratio = std::max(f.tail_ratio, tail_decay(p, EndLocation::Origin));
    f.q_integrable = tail_ok(f.tail_ratio);
  } catch (const Error&) {
    f.q_integrable = false;
  }
  if (mode == HypothesisMode::BoundedGeometry) {
    f.bounded_geometry_checked = true;
    try {
      scan_bounded_geometry(p, f);
    } catch (const Error&) {
      f.bounded_geometry = false;
    }
  }
  return f;
}

TotalQ total_q_routes(const RadialProfile& p, const QuadratureSpec& quad) {
  quad.validate();
  const Dim& dim = p.dim();
  double ratio = 0.0;
  try {
    ratio = tail_decay(p, EndLocation::Infinity);
    if (p.punctured_origin()) ratio = std::max(ratio, tail_decay(p, EndLocation::Origin));
  } catch (const LimitError& e) {
    throw IntegrabilityError(std::string("tail of Delta^m w not resolved: ") + e.what());
  }
  if (!tail_ok(ratio))
    throw IntegrabilityError("r^n |Delta^m w| does not decay toward the ends (ratio " + std::to_string(ratio) + ")");

  TotalQ t;
  const Extrapolation outer = flux_limit(p, EndLocation::Infinity);
  Extrapolation inner;
  if (p.punctured_origin()) inner = flux_limit(p, EndLocation::Origin);
  t.flux_error = total_factor(dim) * (std::abs(outer.error) + std::abs(inner.error));
  t.flux = total_factor(dim) * (outer.value - inner.value);
  t.quadrature = total_factor(dim) * tail_integral(p, lower_limit(p));
  t.value = t.flux;
  const double tol = 10.0 * quad.eps;
  if (std::abs(t.flux - t.quadrature) > tol)
    throw ConsistencyError("total Q: flux " + std::to_string(t.flux) + " vs quadrature " +
                           std::to_string(t.quadrature));
  return t;
}

double total_q(const RadialProfile& p, const QuadratureSpec& quad) { return total_q_routes(p, quad).value; }

GBCReport verify_gbc_rn(const RadialProfile& p, const QuadratureSpec& quad) {
  if (p.punctured_origin()) throw DomainError("punctured profiles have two ends; use the multi-end check");
  GBCReport rep;
  rep.n = p.dim().n;
  rep.bound = 1.0;
  rep.flags = check_hypotheses(p, HypothesisMode::Basic, quad.r_max);
  try {
    const TotalQ t = total_q_routes(p, quad);
    rep.total = t.value;
    rep.flux = t.flux;
    rep.quadrature = t.quadrature;
    rep.contributions.push_back({"infinity", t.flux, t.quadrature});
  } catch (const IntegrabilityError&) {
    rep.flags.q_integrable = false;
    rep.total = rep.flux = rep.quadrature = std::numeric_limits<double>::quiet_NaN();
  }
  if (!rep.flags.all())
    rep.verdict = Verdict::HypothesesNotMet;
  else
    rep.verdict = rep.total <= rep.bound + kGbcTolerance ? Verdict::Satisfied : Verdict::Violated;
  rep.equality_expected = rep.flags.all() && equality_case_check(p, EndLocation::Infinity);
  rep.equality_observed = std::abs(rep.total - rep.bound) < kGbcTolerance;
  return rep;
}

// ---------------------------------------------------------------------------

RadialFn smooth_step(double a, double b, int continuity) {
  if (!(a >= 0.0 && b > a)) throw DomainError("smooth_step needs 0 <= a < b");
  if (continuity < 0) throw DomainError("continuity order must be non-negative");
  RadialFn f;
  f.even_at_origin = true;
  f.eval = [a, b, continuity](const Jet& r) {
    const double x = r.value();
    if (x <= a) return Jet::constant(0.0, r.order());
    if (x >= b) return Jet::constant(1.0, r.order());
    // Regularized incomplete beta I_t(k+1, k+1) in Bernstein form.
    const int k = continuity, deg = 2 * k + 1;
    const Jet t = (r - a) / (b - a);
    const Jet s = 1.0 - t;
    std::vector<Jet> tp{Jet::constant(1.0, r.order())}, sp{Jet::constant(1.0, r.order())};
    for (int j = 1; j <= deg; ++j) {
      tp.push_back(tp.back() * t);
      sp.push_back(sp.back() * s);
    }
    Jet acc = Jet::constant(0.0, r.order());
    double binom = 1.0;  // C(deg, j)
    for (int j = 0; j <= deg; ++j) {
      if (j > k) acc += binom * (tp[j] * sp[deg - j]);
      binom = binom * (deg - j) / (j + 1);
    }
    return acc;
  };
  return f;
}

RadialFn standard_cutoff(const Dim& dim) {
  const RadialFn up = smooth_step(1.0, 2.0, dim.n), down = smooth_step(3.0, 4.0, dim.n);
  return up * (constant_fn(1.0) - down);
}

namespace {

struct Piece {
  double flux = 0.0, quadrature = 0.0;
};

// int Delta^m u r^{n-1} dr over consecutive panels, for a radial function u.
double shell_integral(const RadialFn& u, const Dim& dim, const std::vector<double>& panels) {
  auto h = [&](double r) { return delta_m_fn(u, dim, r) * std::pow(r, dim.n - 1); };
  return integrate_panels(h, panels, kIntAbs, kIntRel).value;
}

double origin_integral(const RadialProfile& p, double b) {
  const Dim& dim = p.dim();
  auto h = [&](double r) { return radial_delta_power(p, dim.m, r) * std::pow(r, dim.n - 1); };
  return integrate(h, lower_limit(p), b, kIntAbs, kIntRel).value;
}

Piece infinity_piece(const RadialProfile& w, const Localization& loc) {
  const Dim& dim = w.dim();
  Piece out;
  out.flux = total_factor(dim) * flux_limit(w, EndLocation::Infinity).value;
  const RadialFn u = smooth_step(loc.inner, loc.outer, dim.n) * w.as_fn();
  out.quadrature = total_factor(dim) * (shell_integral(u, dim, {loc.inner, loc.outer}) + tail_integral(w, loc.outer));
  return out;
}

Piece puncture_piece(const RadialProfile& w, const Localization& loc) {
  const Dim& dim = w.dim();
  Piece out;
  out.flux = -total_factor(dim) * flux_limit(w, EndLocation::Origin).value;
  const RadialFn u = (constant_fn(1.0) - smooth_step(loc.inner, loc.outer, dim.n)) * w.as_fn();
  out.quadrature = total_factor(dim) * (origin_integral(w, loc.inner) + shell_integral(u, dim, {loc.inner, loc.outer}));
  return out;
}

bool end_is_complete(const EndSpec& e) { return e.completeness != Completeness::Incomplete; }

}  // namespace

GBCReport multi_end_total(const std::vector<EndSpec>& ends, const std::vector<Localization>& loc,
                          const RadialProfile& interior, const QuadratureSpec& quad) {
  quad.validate();
  if (ends.empty() || ends.size() != loc.size())
    throw DecompositionError("every end needs exactly one localization");
  const Dim& dim = interior.dim();
  int at_infinity = -1;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    if (ends[i].profile.dim().n != dim.n) throw DecompositionError("ends and interior differ in dimension");
    if (!(loc[i].inner > 0.0 && loc[i].outer > loc[i].inner))
      throw DecompositionError("localization needs 0 < inner < outer");
    if (ends[i].location == EndLocation::Infinity) {
      if (at_infinity >= 0) throw DecompositionError("more than one end at infinity");
      at_infinity = static_cast<int>(i);
    }
  }
  if (at_infinity < 0) throw DecompositionError("no end at infinity");
  const Localization& far = loc[at_infinity];
  int centred = -1;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    if (static_cast<int>(i) == at_infinity) continue;
    if (std::abs(loc[i].center) + loc[i].outer > far.inner)
      throw DecompositionError("puncture support " + ends[i].label + " overlaps the end at infinity");
    for (std::size_t j = i + 1; j < ends.size(); ++j) {
      if (static_cast<int>(j) == at_infinity) continue;
      if (std::abs(loc[i].center - loc[j].center) < loc[i].outer + loc[j].outer)
        throw DecompositionError("supports of " + ends[i].label + " and " + ends[j].label + " overlap");
    }
    if (loc[i].center == 0.0) centred = static_cast<int>(i);
  }

  GBCReport rep;
  rep.n = dim.n;
  rep.bound = 2.0 - static_cast<double>(ends.size());
  const double tol = 10.0 * quad.eps;
  auto add = [&](const std::string& label, const Piece& piece) {
    if (std::abs(piece.flux - piece.quadrature) > tol)
      throw ConsistencyError(label + ": flux " + std::to_string(piece.flux) + " vs quadrature " +
                             std::to_string(piece.quadrature));
    rep.contributions.push_back({label, piece.flux, piece.quadrature});
    rep.flux += piece.flux;
    rep.quadrature += piece.quadrature;
  };

  bool complete = true, scalar_nonneg = true, q_integrable = true, equality = true;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    const EndSpec& e = ends[i];
    complete = complete && end_is_complete(e);
    try {
      const double gate = end_gate(e.profile, e.location, quad.r_max);
      rep.flags.worst_gate = i == 0 ? gate : std::max(rep.flags.worst_gate, gate);
      scalar_nonneg = scalar_nonneg && gate <= kGateTolerance;
      const double ratio = tail_decay(e.profile, e.location);
      rep.flags.tail_ratio = std::max(rep.flags.tail_ratio, ratio);
      q_integrable = q_integrable && tail_ok(ratio);
    } catch (const Error&) {
      scalar_nonneg = q_integrable = false;
    }
    equality = equality && equality_case_check(e.profile, e.location);
    if (!tail_ok(rep.flags.tail_ratio)) continue;
    add(e.label, e.location == EndLocation::Infinity ? infinity_piece(e.profile, loc[i])
                                                     : puncture_piece(e.profile, loc[i]));
  }

  // Interior remainder: Delta^m of a compactly supported function. Computed
  // when it is radial, i.e. when every puncture sits at the centre.
  const bool radial_interior = ends.size() == 1 || (ends.size() == 2 && centred >= 0);
  if (radial_interior) {
    const double a = centred >= 0 ? loc[centred].inner : 0.0;
    if (a == 0.0 && interior.punctured_origin())
      throw DecompositionError("interior profile is singular inside the interior region");
    const RadialFn far_step = smooth_step(far.inner, far.outer, dim.n);
    RadialFn cut = constant_fn(1.0) - far_step;
    std::vector<double> panels{a, far.inner, far.outer};
    if (centred >= 0) {
      cut = smooth_step(loc[centred].inner, loc[centred].outer, dim.n) - far_step;
      panels.insert(panels.begin() + 1, loc[centred].outer);
    }
    Piece piece;
    piece.quadrature = total_factor(dim) * shell_integral(cut * interior.as_fn(), dim, panels);
    add("interior", piece);
  }

  rep.flags.complete = complete;
  rep.flags.scalar_nonneg = scalar_nonneg;
  rep.flags.q_integrable = q_integrable;
  rep.total = rep.flux;
  if (!rep.flags.all()) {
    rep.verdict = Verdict::HypothesesNotMet;
    if (!q_integrable) rep.total = rep.flux = rep.quadrature = std::numeric_limits<double>::quiet_NaN();
  } else {
    rep.verdict = rep.total <= rep.bound + kGbcTolerance ? Verdict::Satisfied : Verdict::Violated;
  }
  rep.equality_expected = rep.flags.all() && equality;
  rep.equality_observed = std::abs(rep.total - rep.bound) < kGbcTolerance;
  return rep;
}

// ---------------------------------------------------------------------------

double gluing_invariance(const RadialProfile& end_profile, const RadialFn& eta) {
  for (double r : log_spaced(1e-3, 1.0, 24))
    if (eta(r) != 0.0) throw CutoffError("cutoff does not vanish on r <= 1");
  for (double r : log_spaced(4.0, 64.0, 24))
    if (eta(r) != 0.0) throw CutoffError("cutoff does not vanish on r >= 4");
  for (int i = 1; i < 24; ++i)
    if (std::abs(eta(2.0 + i / 24.0) - 1.0) > 1e-12) throw CutoffError("cutoff is not 1 on (2, 3)");

  const Dim& dim = end_profile.dim();
  RadialFn log_r = radial_fn([](const RadialPoint& pt) { return log(pt.r); }, false);
  const RadialFn modifier = eta * (-1.0 * end_profile.as_fn() - log_r);
  const std::vector<double> panels{1.0, 2.0, 3.0, 4.0};
  auto h = [&](double r) { return delta_m_fn(modifier, dim, r) * std::pow(r, dim.n - 1); };
  return std::abs(total_factor(dim) * integrate_panels(h, panels, kIntAbs, kIntRel).value);
}

// ---------------------------------------------------------------------------

namespace {

void require_four(const RadialProfile& p) {
  if (p.dim().n != 4) throw DimensionError("level-set identities are implemented for n = 4");
}

void require_decreasing(const RadialProfile& p, double a, double b) {
  for (double r : log_spaced(std::max(a, 1e-4), b, 64))
    if (!(p.eval(r, 1) < 0.0)) throw LevelSetError("e^w is not strictly decreasing (w' >= 0 at r = " +
                                                   std::to_string(r) + ")");
}

constexpr double kLevelStep = 1e-3;

}  // namespace

double level_radius(const RadialProfile& p, double lambda) {
  require_four(p);
  if (!(lambda > 0.0)) throw DomainError("level must be positive");
  const double target = std::log(lambda);
  const double a = p.is_analytic() ? (p.punctured_origin() ? 1e-12 : 0.0) : p.domain_lo();
  const double cap = p.is_analytic() ? 1e12 : p.domain_hi();
  double b = std::min(1.0, cap);
  auto g = [&](double r) { return p.eval(r) - target; };
  while (g(b) > 0.0 && b < cap) b = std::min(2.0 * b, cap);
  require_decreasing(p, a, b);
  if (g(b) == 0.0) return b;
  if (!(g(a) > 0.0) || !(g(b) < 0.0)) throw DomainError("level " + std::to_string(lambda) + " outside the range of e^w");
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(g, a, b, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (root.first + root.second);
}

namespace {

// |S| int_a^b expr(r) r^3 dr.
double ball_integral(const RadialProfile& p, const RadialExpr& expr, double a, double b) {
  auto h = [&](double r) { return radial_eval(expr, r, !p.punctured_origin(), 6) * r * r * r; };
  return p.dim().sphere_volume * integrate(h, a, b, kIntAbs, kIntRel).value;
}

struct Bracket {
  double radius = 0.0;
  double volume = 0.0;    // int (Delta_g w) f dv_g
  double boundary = 0.0;  // int_S (d_n w) f dv'_g, outward normal
};

Bracket level_bracket(const RadialProfile& p, const RadialFn& f, double lambda, double inner) {
  const int n = 4;
  Bracket b;
  b.radius = level_radius(p, lambda);
  if (!(b.radius > inner)) throw DomainError("level set lies inside the truncation radius");
  b.volume = ball_integral(
      p,
      [&](const RadialPoint& pt) {
        const Jet w = w_jet(p, pt);
        const Jet dw = w.derivative();
        const int k = dw.order();
        const Jet lap = flat_laplacian(w, pt, n).truncated(k - 1);
        const Jet fx = f.eval(exp(w.truncated(k - 1)));
        return exp(2.0 * w.truncated(k - 1)) * (lap + 2.0 * (dw * dw).truncated(k - 1)) * fx;
      },
      inner, b.radius);
  const double w = p.eval(b.radius), w1 = p.eval(b.radius, 1);
  b.boundary = p.dim().sphere_volume * std::pow(b.radius, 3) * std::exp(2.0 * w) * w1 * f(std::exp(w));
  return b;
}

double lhs_integral(const RadialProfile& p, const RadialFn& f, double inner, double radius) {
  const int n = 4;
  return ball_integral(
      p,
      [&](const RadialPoint& pt) {
        const Jet w = w_jet(p, pt);
        const Jet fx = f.eval(exp(w));
        const Jet dw = w.derivative(), df = fx.derivative();
        const int k = df.order();
        const Jet lapf = flat_laplacian(fx, pt, n).truncated(k - 1);
        return exp(2.0 * w.truncated(k - 1)) * (lapf + 2.0 * (dw.truncated(k) * df).truncated(k - 1));
      },
      inner, radius);
}

}  // namespace

LevelSetIdentity levelset_identity(const RadialProfile& p, const RadialFn& f, double lambda, double inner) {
  require_four(p);
  LevelSetIdentity out;
  out.lambda = lambda;
  out.radius = level_radius(p, lambda);
  out.lhs = lhs_integral(p, f, inner, out.radius);
  const double h = kLevelStep * lambda;
  auto phi = [&](double l) {
    const Bracket b = level_bracket(p, f, l, inner);
    return b.volume - b.boundary;
  };
  out.rhs_printed = lambda * (phi(lambda + h) - phi(lambda - h)) / (2.0 * h);
  out.rhs = kLevelSetOrientation * out.rhs_printed;
  if (inner > 0.0) {
    const double l = std::exp(p.eval(inner));
    const double df = (f(l * (1.0 + kLevelStep)) - f(l * (1.0 - kLevelStep))) / (2.0 * kLevelStep * l);
    out.inner_flux = p.dim().sphere_volume * std::pow(inner, 3) * l * l * df * l * p.eval(inner, 1);
  }
  out.defect = std::abs(out.lhs + out.inner_flux - out.rhs);
  return out;
}

namespace {

double f_value(const RadialProfile& p, double lambda, double inner) {
  const int n = 4;
  const double rho = level_radius(p, lambda);
  if (!(rho > inner)) throw DomainError("level set lies inside the truncation radius");
  const double vol = ball_integral(
      p,
      [&](const RadialPoint& pt) {
        const Jet w = w_jet(p, pt);
        const Jet dw = w.derivative();
        const int k = dw.order();
        const Jet g2 = (dw * dw).truncated(k - 1);
        const Jet lap = flat_laplacian(w, pt, n).truncated(k - 1);
        return (-3.0 * (lap + g2) + g2) * g2;  // (3 J e^{2w} + |grad w|^2) |grad w|^2
      },
      inner, rho);
  const double w1 = p.eval(rho, 1);
  return vol + p.dim().sphere_volume * std::pow(rho, 3) * w1 * w1 * w1;
}

LevelSetFrame frame_with(const RadialProfile& p, double lambda, double inner, double kappa) {
  require_four(p);
  LevelSetFrame fr;
  fr.lambda = lambda;
  fr.inner = inner;
  fr.radius = level_radius(p, lambda);
  fr.F = f_value(p, lambda, inner);
  const double h = kLevelStep * lambda;
  fr.lambda_dF = lambda * (f_value(p, lambda + h, inner) - f_value(p, lambda - h, inner)) / (2.0 * h);
  fr.volume_g = ball_integral(
      p, [&](const RadialPoint& pt) { return exp(4.0 * w_jet(p, pt)); }, inner, fr.radius);
  const double w = p.eval(fr.radius);
  fr.area_g = p.dim().sphere_volume * std::pow(fr.radius, 3) * std::exp(3.0 * w);
  fr.normal_slope = p.eval(fr.radius, 1);
  fr.sigma2_integral = ball_integral(
      p, [&](const RadialPoint& pt) { return sigma2_density_jet(w_jet(p, pt), pt, 4); }, inner, fr.radius);
  fr.kappa = kappa;
  const double target = kappa * fr.sigma2_integral;
  fr.defect = std::abs(fr.lambda_dF - target) / std::max(std::abs(target), 1.0);
  return fr;
}

}  // namespace

double levelset_kappa() {
  static std::once_flag once;
  static double kappa = 0.0;
  std::call_once(once, [] {
    const LevelSetFrame fr = frame_with(round_sphere_profile(make_dim(4)), 1.0, 0.0, 0.0);
    kappa = fr.lambda_dF / fr.sigma2_integral;
  });
  return kappa;
}

LevelSetFrame f_lambda(const RadialProfile& p, double lambda, double inner) {
  require_four(p);
  return frame_with(p, lambda, inner, levelset_kappa());
}

// ---------------------------------------------------------------------------

std::vector<RadialProfile> random_complete_profiles(const Dim& dim, int count, std::uint64_t seed, double r_max) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> terms(1, 3);
  std::uniform_real_distribution<double> coef(-1.5, 1.5), rho(0.5, 2.0);
  std::vector<RadialProfile> out;
  while (static_cast<int>(out.size()) < count) {
    std::vector<AnalyticTerm> t;
    const int k = terms(rng);
    for (int i = 0; i < k; ++i) {
      const double c = coef(rng);
      t.push_back(AnalyticTerm::log1p_sq(c, rho(rng)));
    }
    const RadialProfile p = RadialProfile::analytic(dim, std::move(t));
    if (!complete_toward(p, EndLocation::Infinity)) continue;
    if (end_gate(p, EndLocation::Infinity, r_max) > kGateTolerance) continue;
    out.push_back(p);
  }
  return out;
}

SweepReport gbc_sweep(const Dim& dim, int count, std::uint64_t seed, const QuadratureSpec& quad) {
  const auto profiles = random_complete_profiles(dim, count, seed, quad.r_max);
  std::vector<GBCReport> reports(profiles.size());
  parallel_for(profiles.size(), [&](std::size_t i) { reports[i] = verify_gbc_rn(profiles[i], quad); });
  SweepReport s;
  s.profiles = static_cast<int>(profiles.size());
  for (const auto& r : reports) {
    s.totals.push_back(r.total);
    if (r.verdict == Verdict::Violated) ++s.violations;
    if (r.verdict == Verdict::HypothesesNotMet) ++s.hypothesis_failures;
    if (std::isfinite(r.total)) s.max_total = std::max(s.max_total, r.total);
  }
  return s;
}

}  // namespace qcurv
