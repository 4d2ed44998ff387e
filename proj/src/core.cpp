#include "qcurv/core.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qcurv/error.hpp"

namespace qcurv {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Dimension: return "DimensionError";
    case ErrorCode::Domain: return "DomainError";
    case ErrorCode::Order: return "OrderError";
    case ErrorCode::Index: return "IndexError";
    case ErrorCode::Quadrature: return "QuadratureError";
    case ErrorCode::StructureViolation: return "StructureViolation";
    case ErrorCode::Integrability: return "IntegrabilityError";
    case ErrorCode::Limit: return "LimitError";
    case ErrorCode::Consistency: return "ConsistencyError";
    case ErrorCode::NotPolyharmonic: return "NotPolyharmonic";
    case ErrorCode::Resolution: return "ResolutionError";
    case ErrorCode::Precondition: return "PreconditionError";
    case ErrorCode::Decomposition: return "DecompositionError";
    case ErrorCode::Cutoff: return "CutoffError";
    case ErrorCode::LevelSet: return "LevelSetError";
    case ErrorCode::Schema: return "SchemaError";
  }
  return "Error";
}

double double_factorial(int k) {
  double acc = 1.0;
  for (int i = k; i > 1; i -= 2) acc *= i;
  return acc;
}

Dim make_dim(int n) {
  if (n % 2 != 0) throw DimensionError("dimension must be even, got " + std::to_string(n));
  if (n < 2 || n > 8) throw DimensionError("supported dimensions are 2..8, got " + std::to_string(n));
  Dim d;
  d.n = n;
  d.m = n / 2;
  d.sphere_volume = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
  const double df = double_factorial(n - 2);
  d.c_n = 1.0 / (df * df * d.sphere_volume);
  return d;
}

void QuadratureSpec::validate() const {
  if (radial_nodes < 4 || angular_nodes < 4)
    throw DomainError("quadrature node counts must be at least 4");
  if (!(eps > 0.0)) throw DomainError("quadrature tolerance must be positive");
  if (!(r_max > 1.0)) throw DomainError("outer cutoff r_max must exceed 1");
  if (extrapolation_order < 1) throw DomainError("extrapolation order must be at least 1");
}

const char* term_kind_name(AnalyticTerm::Kind kind) {
  switch (kind) {
    case AnalyticTerm::Kind::Log1pSq: return "log1p_sq";
    case AnalyticTerm::Kind::Log: return "log";
    case AnalyticTerm::Kind::Power: return "power";
  }
  return "?";
}

// ---------------------------------------------------------------------------

Jet RadialFn::jet_at(double r, int order) const {
  if (!(r >= lo && r <= hi)) throw DomainError("radius " + std::to_string(r) + " outside function domain");
  if (r <= 0.0 && !even_at_origin) throw DomainError("radius must be positive for a punctured function");
  return eval(Jet::variable(r, order));
}

namespace {

RadialFn combine(const RadialFn& a, const RadialFn& b, std::function<Jet(const Jet&, const Jet&)> op) {
  RadialFn out;
  out.even_at_origin = a.even_at_origin && b.even_at_origin;
  out.lo = std::max(a.lo, b.lo);
  out.hi = std::min(a.hi, b.hi);
  out.eval = [fa = a.eval, fb = b.eval, op = std::move(op)](const Jet& r) { return op(fa(r), fb(r)); };
  return out;
}

// Integer powers are multiplied out so that r = 0 stays admissible.
Jet power_jet(const Jet& r, double p) {
  if (p >= 0.0 && p == std::floor(p) && p <= 32.0) {
    Jet acc = Jet::constant(1.0, r.order());
    for (int i = 0; i < static_cast<int>(p); ++i) acc = acc * r;
    return acc;
  }
  return pow(r, p);
}

}  // namespace

RadialFn operator+(const RadialFn& a, const RadialFn& b) {
  return combine(a, b, [](const Jet& x, const Jet& y) { return x + y; });
}
RadialFn operator-(const RadialFn& a, const RadialFn& b) {
  return combine(a, b, [](const Jet& x, const Jet& y) { return x - y; });
}
RadialFn operator*(const RadialFn& a, const RadialFn& b) {
  return combine(a, b, [](const Jet& x, const Jet& y) { return x * y; });
}
RadialFn operator*(double s, const RadialFn& a) {
  RadialFn out = a;
  out.eval = [f = a.eval, s](const Jet& r) { return s * f(r); };
  return out;
}

RadialFn constant_fn(double value) {
  RadialFn f;
  f.eval = [value](const Jet& r) { return Jet::constant(value, r.order()); };
  return f;
}

// ---------------------------------------------------------------------------

int sampled_spline_degree(const Dim& dim) { return dim.n + 5; }

RadialProfile RadialProfile::analytic(const Dim& dim, std::vector<AnalyticTerm> terms,
                                      bool punctured_origin) {
  for (const auto& t : terms) {
    if (t.kind == AnalyticTerm::Kind::Log1pSq && !(t.param > 0.0))
      throw DomainError("log1p_sq term needs rho > 0");
    const bool singular = t.kind == AnalyticTerm::Kind::Log ||
                          (t.kind == AnalyticTerm::Kind::Power && t.param < 0.0);
    if (singular && !punctured_origin && t.c != 0.0)
      throw DomainError(std::string("term kind '") + term_kind_name(t.kind) +
                        "' requires a profile punctured at the origin");
  }
  RadialProfile p(dim, punctured_origin);
  p.rep_ = std::move(terms);
  return p;
}

RadialProfile RadialProfile::sampled(const Dim& dim, std::vector<double> r, std::vector<double> w,
                                     bool punctured_origin) {
  if (r.size() != w.size()) throw DomainError("sampled profile: r and w differ in length");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw DomainError("sampled profile: r grid must be strictly increasing");
  if (r.empty() || r.front() < 0.0) throw DomainError("sampled profile: radii must be non-negative");
  if (punctured_origin && r.front() <= 0.0)
    throw DomainError("sampled punctured profile cannot contain r = 0");

  std::vector<double> xs, ys;
  if (!punctured_origin) {
    // Even extension through the origin forces w'(0) = 0.
    for (std::size_t i = r.size(); i-- > 0;) {
      if (r[i] == 0.0) continue;
      xs.push_back(-r[i]);
      ys.push_back(w[i]);
    }
  }
  xs.insert(xs.end(), r.begin(), r.end());
  ys.insert(ys.end(), w.begin(), w.end());

  RadialProfile p(dim, punctured_origin);
  Sampled s;
  s.spline = std::make_shared<const BSplineInterpolant>(xs, ys, sampled_spline_degree(dim));
  s.r = std::move(r);
  s.w = std::move(w);
  p.rep_ = std::move(s);
  return p;
}

RadialProfile RadialProfile::sample(const Dim& dim, const RadialFn& fn, std::vector<double> grid,
                                    bool punctured_origin) {
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) w[i] = fn(grid[i]);
  return sampled(dim, std::move(grid), std::move(w), punctured_origin);
}

const std::vector<AnalyticTerm>& RadialProfile::terms() const {
  if (!is_analytic()) throw DomainError("profile is not analytic");
  return std::get<std::vector<AnalyticTerm>>(rep_);
}

const RadialProfile::Sampled& RadialProfile::samples() const {
  if (is_analytic()) throw DomainError("profile is not sampled");
  return std::get<Sampled>(rep_);
}

double RadialProfile::domain_lo() const {
  if (is_analytic()) return 0.0;
  return punctured_ ? samples().r.front() : 0.0;
}

double RadialProfile::domain_hi() const {
  if (is_analytic()) return std::numeric_limits<double>::infinity();
  return samples().r.back();
}

void RadialProfile::check_radius(double r) const {
  if (!(r >= 0.0)) throw DomainError("radius must be non-negative");
  if (punctured_ && r <= 0.0) throw DomainError("radius must be positive for a punctured profile");
  if (r < domain_lo() || r > domain_hi())
    throw DomainError("radius " + std::to_string(r) + " outside the sampled grid hull");
}

Jet RadialProfile::compose(const Jet& r) const {
  if (const auto* terms = std::get_if<std::vector<AnalyticTerm>>(&rep_)) {
    Jet acc = Jet::constant(0.0, r.order());
    for (const auto& t : *terms) {
      if (t.c == 0.0) continue;
      switch (t.kind) {
        case AnalyticTerm::Kind::Log1pSq: {
          const Jet u = r / t.param;
          acc += t.c * log(1.0 + u * u);
          break;
        }
        case AnalyticTerm::Kind::Log: acc += t.c * log(r); break;
        case AnalyticTerm::Kind::Power: acc += t.c * power_jet(r, t.param); break;
      }
    }
    return acc;
  }
  const auto& s = std::get<Sampled>(rep_);
  const int k = std::min(r.order(), Jet::kMaxOrder);
  std::vector<double> d(k + 1);
  s.spline->derivatives(r.value(), k, d);
  return qcurv::compose(Jet::from_derivatives(d), r);
}

Jet RadialProfile::jet_at(double r, int order) const {
  check_radius(r);
  return compose(Jet::variable(r, order));
}

double RadialProfile::eval(double r, int order) const {
  if (order < 0 || order > dim_.n)
    throw OrderError("derivative order " + std::to_string(order) + " outside [0, n]");
  return jet_at(r, order).derivative_value(order);
}

RadialFn RadialProfile::as_fn() const {
  RadialFn f;
  f.even_at_origin = !punctured_;
  f.lo = domain_lo();
  f.hi = domain_hi();
  f.eval = [self = *this](const Jet& r) { return self.compose(r); };
  return f;
}

double RadialProfile::analytic_log_coefficient_at_infinity() const {
  double a = 0.0;
  for (const auto& t : terms()) {
    if (t.c == 0.0) continue;
    switch (t.kind) {
      case AnalyticTerm::Kind::Log1pSq: a += 2.0 * t.c; break;
      case AnalyticTerm::Kind::Log: a += t.c; break;
      case AnalyticTerm::Kind::Power:
        if (t.param > 0.0) return t.c > 0 ? std::numeric_limits<double>::infinity()
                                          : -std::numeric_limits<double>::infinity();
        break;
    }
  }
  return a;
}

double RadialProfile::analytic_log_coefficient_at_origin() const {
  double c = 0.0;
  for (const auto& t : terms())
    if (t.kind == AnalyticTerm::Kind::Log) c += t.c;
  return c;
}

RadialProfile w_a_profile(const Dim& dim, double a) {
  return RadialProfile::analytic(dim, {AnalyticTerm::log1p_sq(0.5 * a, 1.0)});
}

RadialProfile round_sphere_profile(const Dim& dim) {
  return RadialProfile::analytic(
      dim, {AnalyticTerm::power(std::log(2.0), 0.0), AnalyticTerm::log1p_sq(-1.0, 1.0)});
}

RadialProfile cylinder_profile(const Dim& dim) {
  return RadialProfile::analytic(dim, {AnalyticTerm::log(-1.0)}, true);
}

RadialProfile flat_profile(const Dim& dim) { return RadialProfile::analytic(dim, {}); }

std::vector<double> sinh_grid(int count, double r_max, double scale) {
  if (count < 2) throw DomainError("grid needs at least two points");
  std::vector<double> g(count);
  const double h = std::asinh(r_max / scale) / (count - 1);
  for (int i = 0; i < count; ++i) g[i] = scale * std::sinh(i * h);
  g.back() = r_max;
  return g;
}

std::vector<double> geometric_grid(int count, double r_min, double r_max) {
  if (count < 2 || !(r_min > 0.0) || !(r_max > r_min)) throw DomainError("invalid geometric grid");
  std::vector<double> g(count);
  const double q = std::log(r_max / r_min) / (count - 1);
  for (int i = 0; i < count; ++i) g[i] = r_min * std::exp(i * q);
  g.back() = r_max;
  return g;
}

}  // namespace qcurv
