#include "qcurv/radial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "qcurv/quadrature.hpp"
#include "qcurv/radial_ops.hpp"

namespace qcurv {

const char* end_location_name(EndLocation loc) {
  return loc == EndLocation::Origin ? "origin" : "infinity";
}

const char* completeness_name(Completeness c) {
  switch (c) {
    case Completeness::Complete: return "complete";
    case Completeness::Incomplete: return "incomplete";
    case Completeness::BorderlineResolved: return "borderline-resolved";
  }
  return "?";
}

namespace {

// Smooth and even at the origin: no puncture and only even integer powers.
bool even_at_origin(const RadialProfile& p) {
  if (p.punctured_origin()) return false;
  if (!p.is_analytic()) return true;
  for (const auto& t : p.terms()) {
    if (t.kind != AnalyticTerm::Kind::Power || t.c == 0.0) continue;
    const double half = 0.5 * t.param;
    if (t.param < 0.0 || half != std::floor(half)) return false;
  }
  return true;
}

double log_r_e_w(const RadialProfile& p, double r) { return p.eval(r) + std::log(r); }

}  // namespace

namespace {

// Delta^k w at r, or its r-derivative when `slope`.
double delta_power(const RadialProfile& p, int k, double r, bool slope) {
  const Dim& dim = p.dim();
  if (k < 0 || k > dim.m) throw OrderError("Delta power must lie in [0, m]");
  if (!p.is_analytic() && 2 * k + (slope ? 1 : 0) > sampled_spline_degree(dim))
    throw OrderError("sampled profile lacks the derivatives for this Delta power");
  if (!(r >= 0.0)) throw DomainError("radius must be non-negative");
  const bool even = even_at_origin(p);
  if (r == 0.0) {
    if (p.punctured_origin()) throw DomainError("profile is punctured at the origin");
    if (!even) throw OrderError("profile is not smooth at the origin");
  }
  if (r < p.domain_lo() || r > p.domain_hi()) throw DomainError("radius outside the profile's domain");
  const int order = 2 * k + 2 + (slope ? 1 : 0);
  auto through_jets = [&](const RadialProfile& q, bool smooth) {
    return radial_eval(
        [&](const RadialPoint& pt) {
          const Jet u = flat_laplacian_power(q.compose(pt.r), pt, dim.n, k);
          return slope ? u.derivative() : u;
        },
        r, smooth, order);
  };
  if (!p.is_analytic()) return through_jets(p, even);

  // Monomials and logarithms follow the power rule exactly; the remaining
  // terms go through jets.
  double exact = 0.0;
  std::vector<AnalyticTerm> rest;
  for (const auto& t : p.terms()) {
    if (t.kind == AnalyticTerm::Kind::Log1pSq) {
      rest.push_back(t);
      continue;
    }
    double coef = t.c, power = t.param;
    int steps = k;
    if (t.kind == AnalyticTerm::Kind::Log) {
      if (k == 0) {
        exact += slope ? t.c / r : t.c * std::log(r);
        continue;
      }
      coef *= dim.n - 2;
      power = -2.0;
      --steps;
    }
    for (int i = 0; i < steps && coef != 0.0; ++i) {
      coef *= power * (power + dim.n - 2);
      power -= 2.0;
    }
    if (slope) {
      coef *= power;
      power -= 1.0;
    }
    if (coef != 0.0) exact += coef * std::pow(r, power);
  }
  if (rest.empty()) return exact;
  return exact + through_jets(RadialProfile::analytic(dim, std::move(rest), p.punctured_origin()), true);
}

}  // namespace

double radial_delta_power(const RadialProfile& p, int k, double r) { return delta_power(p, k, r, false); }

double radial_flux(const RadialProfile& p, double r) {
  if (!(r > 0.0)) throw DomainError("flux needs a positive radius");
  return std::pow(r, p.dim().n - 1) * delta_power(p, p.dim().m - 1, r, true);
}

// ---------------------------------------------------------------------------

double BasisFunction::operator()(double r) const {
  return is_log ? std::log(r) : std::pow(r, power);
}

RadialFn BasisFunction::fn() const {
  RadialFn f;
  f.even_at_origin = !is_log && power >= 0;
  f.eval = [is_log = is_log, power = power](const Jet& r) {
    if (is_log) return log(r);
    if (power == 0) return Jet::constant(1.0, r.order());
    return pow(r, static_cast<double>(power));
  };
  return f;
}

std::vector<BasisFunction> polyharmonic_basis(const Dim& dim) {
  std::vector<BasisFunction> out;
  out.push_back({"1", false, 0});
  out.push_back({"ln r", true, 0});
  for (int p = 2; p <= dim.n - 2; p += 2) out.push_back({"r^" + std::to_string(p), false, p});
  for (int p = 2; p <= dim.n - 2; p += 2) out.push_back({"r^-" + std::to_string(p), false, -p});
  return out;
}

Decomposition basis_decompose(const std::vector<double>& r, const std::vector<double>& u, const Dim& dim,
                              double relative_tol, double absolute_tol) {
  if (r.size() != u.size()) throw DomainError("radius and value arrays differ in length");
  if (r.size() < static_cast<std::size_t>(2 * dim.n))
    throw DomainError("need at least 2n sample radii, got " + std::to_string(r.size()));
  const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
  if (!(*lo > 0.0)) throw DomainError("sample radii must be positive");
  if (*hi < 10.0 * *lo) throw DomainError("sample radii must span at least one decade");

  const auto basis = polyharmonic_basis(dim);
  const Eigen::Index rows = static_cast<Eigen::Index>(r.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = basis[j](r[i]);
    b[i] = u[i];
  }
  Eigen::VectorXd scale(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double nrm = a.col(j).norm();
    scale[j] = nrm > 0.0 ? 1.0 / nrm : 1.0;
  }
  const Eigen::MatrixXd as = a * scale.asDiagonal();
  const Eigen::VectorXd y = as.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd c = scale.cwiseProduct(y);

  Decomposition out;
  out.coefficients.assign(c.data(), c.data() + c.size());
  out.residual = (as * y - b).norm();
  out.norm = b.norm();
  if (out.residual > relative_tol * out.norm + absolute_tol)
    throw NotPolyharmonic("least-squares residual " + std::to_string(out.residual) + " exceeds " +
                          std::to_string(relative_tol) + " * ||u|| = " + std::to_string(relative_tol * out.norm));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct EndSequence {
  std::vector<double> r, h;
};

// Geometric radii approaching the end, with the extrapolation variable h -> 0.
EndSequence end_sequence(const RadialProfile& p, EndLocation end) {
  constexpr int kLevels = 7;
  EndSequence seq;
  if (end == EndLocation::Infinity) {
    double top = 32.0 * std::pow(2.0, kLevels - 1);
    int levels = kLevels;
    if (!p.is_analytic()) {
      top = 0.9 * p.domain_hi();
      levels = std::min(kLevels, static_cast<int>(std::floor(std::log2(top / 4.0))) + 1);
      if (levels < 3) throw LimitError("sampled profile does not reach far enough to extrapolate toward infinity");
    }
    for (int k = 0; k < levels; ++k) seq.r.push_back(top * std::pow(2.0, k - levels + 1));
  } else {
    double bottom = std::pow(2.0, -16.0);
    int levels = kLevels;
    if (!p.is_analytic()) {
      bottom = std::max(2.0 * p.domain_lo(), 1e-3);
      levels = std::min(kLevels, static_cast<int>(std::floor(std::log2(0.25 / bottom))) + 1);
      if (levels < 3) throw LimitError("sampled profile does not reach close enough to the origin");
    }
    for (int k = 0; k < levels; ++k) seq.r.push_back(bottom * std::pow(2.0, levels - 1 - k));
  }
  for (double r : seq.r) seq.h.push_back(end == EndLocation::Infinity ? 1.0 / r : r);
  return seq;
}

bool settled(const Extrapolation& ex) {
  return std::isfinite(ex.value) && ex.error <= 1e-6 * (1.0 + std::abs(ex.value));
}

}  // namespace

ExponentEstimate asymptotic_exponent(const RadialProfile& p, EndLocation end) {
  const EndSequence seq = end_sequence(p, end);
  std::vector<double> y;
  for (double r : seq.r) y.push_back(r * p.eval(r, 1));
  const Extrapolation ex = extrapolate_to_zero(seq.h, y);
  if (!settled(ex))
    throw LimitError(std::string("r w' does not settle toward ") + end_location_name(end) + " (estimate " +
                     std::to_string(ex.value) + ", spread " + std::to_string(ex.error) + ")");
  const double err = std::max(ex.error, 1e-14 * (1.0 + std::abs(ex.value)));
  return {ex.value, ex.value - err, ex.value + err};
}

CompletenessReport completeness_check(const RadialProfile& p, EndLocation end) {
  if (end == EndLocation::Origin && !p.punctured_origin())
    throw DomainError("the origin is an end only for punctured profiles");
  CompletenessReport rep;
  rep.exponent = asymptotic_exponent(p, end);
  const double c1 = rep.exponent.c1;
  if (std::abs(c1 + 1.0) >= kBorderlineTolerance) {
    const bool complete = end == EndLocation::Infinity ? c1 >= -1.0 : c1 <= -1.0;
    rep.verdict = complete ? Completeness::Complete : Completeness::Incomplete;
    return rep;
  }

  // Borderline: test divergence of int e^w dr toward the end. In t = |ln r|
  // the integrand is e^{w + ln r}, and shells [t_k, 2 t_k] carry the sum.
  rep.borderline = true;
  constexpr int kShells = 8;
  double t_top = 256.0;
  if (!p.is_analytic())
    t_top = end == EndLocation::Infinity ? std::log(p.domain_hi()) : -std::log(p.domain_lo());
  if (!(t_top > 4.0)) throw LimitError("sampled profile too short to resolve the borderline case");
  const double sgn = end == EndLocation::Infinity ? 1.0 : -1.0;
  auto h = [&](double t) { return std::exp(log_r_e_w(p, std::exp(sgn * t))); };

  std::vector<double> shells;
  const double t0 = t_top / std::pow(2.0, kShells);
  double sum = integrate(h, 0.0, t0, 1e-12, 1e-10).value;
  for (int k = 0; k < kShells; ++k) {
    const double a = t0 * std::pow(2.0, k);
    shells.push_back(integrate(h, a, 2.0 * a, 1e-12, 1e-10).value);
    sum += shells.back();
  }
  const double last = shells.back();
  const double q = last / shells[shells.size() - 2];
  rep.decay_exponent = 1.0 - std::log2(q);

  // Continue the shell sequence geometrically until the threshold is passed
  // or the projected sum settles.
  rep.projected_sum = sum;
  if (q >= 1.0) {
    double term = last;
    int j = 0;
    while (rep.projected_sum <= kDivergenceThreshold && j < 4096) {
      term *= q;
      rep.projected_sum += term;
      ++j;
    }
    rep.shells_to_threshold = rep.projected_sum > kDivergenceThreshold ? j : -1;
  } else {
    rep.projected_sum = sum + last * q / (1.0 - q);
    if (sum > kDivergenceThreshold) {
      rep.shells_to_threshold = 0;
    } else if (rep.projected_sum > kDivergenceThreshold) {
      double acc = sum, term = last;
      int j = 0;
      while (acc <= kDivergenceThreshold) {
        term *= q;
        acc += term;
        ++j;
      }
      rep.shells_to_threshold = j;
    }
  }
  rep.verdict = rep.shells_to_threshold >= 0 ? Completeness::BorderlineResolved : Completeness::Incomplete;
  return rep;
}

bool equality_case_check(const RadialProfile& p, EndLocation end) {
  // ln(r e^w) has log-derivative 1 + r w' (at infinity) or -(1 + r w')
  // toward the origin. Away from the critical exponent its sign decides;
  // at the critical exponent ln(r e^w) itself must converge.
  ExponentEstimate e;
  try {
    e = asymptotic_exponent(p, end);
  } catch (const LimitError&) {
    return false;
  }
  const double excess = e.c1 + 1.0;
  if (excess > kBorderlineTolerance) return end == EndLocation::Origin;
  if (excess < -kBorderlineTolerance) return end == EndLocation::Infinity;
  const EndSequence seq = end_sequence(p, end);
  std::vector<double> g;
  for (double r : seq.r) g.push_back(log_r_e_w(p, r));
  return settled(extrapolate_to_zero(seq.h, g));
}

double scalar_sign_gate(const RadialProfile& p, double r) {
  const Dim& dim = p.dim();
  return radial_eval(
      [&](const RadialPoint& pt) {
        const Jet w = p.compose(pt.r);
        const Jet dw = w.derivative();
        return flat_laplacian(w, pt, dim.n) + static_cast<double>(dim.m - 1) * (dw * dw).truncated(dw.order() - 1);
      },
      r, even_at_origin(p), 6);
}

EndSpec make_end(std::string label, EndLocation loc, const RadialProfile& p) {
  const CompletenessReport rep = completeness_check(p, loc);
  return EndSpec{std::move(label), loc, p, rep.exponent.c1, rep.verdict};
}

}  // namespace qcurv
