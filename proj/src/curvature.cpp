#include "qcurv/curvature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <mutex>

#include "qcurv/quadrature.hpp"

namespace qcurv {
namespace {

constexpr int kOrder = kDefaultJetOrder;

double eval_at(const RadialProfile& p, const RadialExpr& expr, double r) {
  if (!(r >= 0.0)) throw DomainError("radius must be non-negative");
  if (p.punctured_origin() && r <= 0.0) throw DomainError("radius must be positive for a punctured profile");
  if (r < p.domain_lo() || r > p.domain_hi())
    throw DomainError("radius " + std::to_string(r) + " outside the sampled grid hull");
  return radial_eval(expr, r, !p.punctured_origin(), kOrder);
}

void require_dim4(const RadialProfile& p, const char* what) {
  if (p.dim().n != 4) throw DimensionError(std::string(what) + " is defined for n = 4 only");
}

// w', w'/r, w'' jets.
struct Derivs {
  Jet w, d1, d1_over_r, d2, lap;
};

Derivs derivs(const Jet& w, const RadialPoint& pt, int n) {
  Derivs d;
  d.w = w;
  d.d1 = w.derivative();
  d.d2 = d.d1.derivative();
  d.d1_over_r = pt.over_r(d.d1).truncated(d.d2.order());
  d.lap = d.d2 + (n - 1) * d.d1_over_r;
  return d;
}

}  // namespace

Jet w_jet(const RadialProfile& p, const RadialPoint& pt) { return p.compose(pt.r); }

Jet scalar_curvature_jet(const Jet& w, const RadialPoint& pt, int n) {
  const Derivs d = derivs(w, pt, n);
  const Jet inner = d.lap + (0.5 * (n - 2)) * (d.d1 * d.d1);
  return (-2.0 * (n - 1)) * exp(-2.0 * d.w) * inner;
}

Jet j_curvature_jet(const Jet& w, const RadialPoint& pt, int n) {
  return scalar_curvature_jet(w, pt, n) / (2.0 * (n - 1));
}

Jet q_curvature_jet(const Jet& w, const RadialPoint& pt, const Dim& dim) {
  Jet lap_m = flat_laplacian_power(w, pt, dim.n, dim.m);
  if (dim.m % 2 == 1) lap_m = -1.0 * lap_m;
  return exp(-static_cast<double>(dim.n) * w.truncated(lap_m.order())) * lap_m;
}

Jet curved_laplacian_jet(const Jet& u, const Jet& w, const RadialPoint& pt, int n) {
  const Jet lap = flat_laplacian(u, pt, n);
  const Jet grad = (w.derivative() * u.derivative()).truncated(lap.order());
  return exp(-2.0 * w.truncated(lap.order())) * (lap + (n - 2.0) * grad);
}

Jet ricci_radial_jet(const Jet& w, const RadialPoint& pt, int n) {
  const Derivs d = derivs(w, pt, n);
  return (2.0 - n) * d.d2 - d.lap;
}

Jet ricci_tangential_jet(const Jet& w, const RadialPoint& pt, int n) {
  const Derivs d = derivs(w, pt, n);
  return (2.0 - n) * d.d1_over_r - d.lap - (n - 2.0) * (d.d1 * d.d1).truncated(d.lap.order());
}

Jet sigma2_density_jet(const Jet& w, const RadialPoint& pt, int n) {
  const Derivs d = derivs(w, pt, n);
  const Jet g2 = (d.d1 * d.d1).truncated(d.lap.order());
  const Jet hess2 = d.d2 * d.d2 + (n - 1.0) * d.d1_over_r * d.d1_over_r;
  return 0.5 * (d.lap * d.lap - hess2 + 2.0 * d.d2 * g2 + g2 * d.lap);
}

// ---------------------------------------------------------------------------

double scalar_curvature(const RadialProfile& p, double r) {
  const int n = p.dim().n;
  return eval_at(p, [&](const RadialPoint& pt) { return scalar_curvature_jet(w_jet(p, pt), pt, n); }, r);
}

namespace {

struct FlatData {
  double w, d1, d1_over_r, d2, lap;
};

FlatData flat_data(const RadialProfile& p, double r) {
  const int n = p.dim().n;
  FlatData f{};
  f.d1_over_r = eval_at(p, [&](const RadialPoint& pt) { return pt.over_r(w_jet(p, pt).derivative()); }, r);
  const Jet wj = p.jet_at(r, 2);
  f.w = wj.value();
  f.d1 = wj.derivative_value(1);
  f.d2 = wj.derivative_value(2);
  f.lap = f.d2 + (n - 1) * f.d1_over_r;
  return f;
}

Eigen::MatrixXd radial_matrix(int n, double radial, double tangential) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  m(0, 0) = radial;
  for (int i = 1; i < n; ++i) m(i, i) = tangential;
  return m;
}

}  // namespace

Eigen::MatrixXd ricci(const RadialProfile& p, double r) {
  const int n = p.dim().n;
  const FlatData f = flat_data(p, r);
  const double g2 = f.d1 * f.d1;
  // (2-n) w_ij - Delta w delta_ij + (n-2)(w_i w_j - |dw|^2 delta_ij)
  const double rr = (2.0 - n) * f.d2 - f.lap;
  const double tt = (2.0 - n) * f.d1_over_r - f.lap - (n - 2.0) * g2;
  return radial_matrix(n, rr, tt);
}

Eigen::MatrixXd schouten(const RadialProfile& p, double r) {
  const FlatData f = flat_data(p, r);
  const double g2 = f.d1 * f.d1;
  return radial_matrix(p.dim().n, -f.d2 + g2 - 0.5 * g2, -f.d1_over_r - 0.5 * g2);
}

double elementary_symmetric(std::span<const double> values, int k) {
  if (k < 0 || k > static_cast<int>(values.size()))
    throw IndexError("sigma_k index " + std::to_string(k) + " outside [1, " + std::to_string(values.size()) + "]");
  std::vector<double> e(k + 1, 0.0);
  e[0] = 1.0;
  for (double v : values)
    for (int j = k; j >= 1; --j) e[j] += v * e[j - 1];
  return e[k];
}

double sigma_k(const CurvatureFrame& frame, int k) {
  if (k < 1 || k > frame.n)
    throw IndexError("sigma_k index " + std::to_string(k) + " outside [1, " + std::to_string(frame.n) + "]");
  return elementary_symmetric(std::span<const double>(frame.eig.data(), frame.eig.size()), k);
}

double q_curvature_lcf(const RadialProfile& p, double r) {
  const Dim& dim = p.dim();
  return eval_at(p, [&](const RadialPoint& pt) { return q_curvature_jet(w_jet(p, pt), pt, dim); }, r);
}

double q4_general(const RadialProfile& p, double r) {
  require_dim4(p, "q4_general");
  const int n = 4;
  return eval_at(
      p,
      [&](const RadialPoint& pt) {
        const Jet w = w_jet(p, pt);
        const Jet scal = scalar_curvature_jet(w, pt, n);
        const Jet lap_r = curved_laplacian_jet(scal, w, pt, n);
        const int k = lap_r.order();
        const Jet rr = ricci_radial_jet(w, pt, n).truncated(k);
        const Jet tt = ricci_tangential_jet(w, pt, n).truncated(k);
        const Jet ric2 = exp(-4.0 * w.truncated(k)) * (rr * rr + (n - 1.0) * tt * tt);
        const Jet s = scal.truncated(k);
        return (1.0 / 6.0) * (-3.0 * ric2 + s * s - lap_r);
      },
      r);
}

double curved_laplacian(const RadialFn& u, const RadialProfile& p, double r) {
  const int n = p.dim().n;
  if (!(r >= u.lo && r <= u.hi)) throw DomainError("radius outside the test function's domain");
  const bool even = !p.punctured_origin() && u.even_at_origin;
  if (p.punctured_origin() && r <= 0.0) throw DomainError("radius must be positive for a punctured profile");
  if (r < p.domain_lo() || r > p.domain_hi()) throw DomainError("radius outside the profile domain");
  return radial_eval(
      [&](const RadialPoint& pt) { return curved_laplacian_jet(u.eval(pt.r), w_jet(p, pt), pt, n); }, r,
      even, kOrder);
}

double paneitz_apply(const RadialFn& f, const RadialProfile& p, double r) {
  require_dim4(p, "paneitz_apply");
  const int n = 4;
  if (!(r >= f.lo && r <= f.hi)) throw DomainError("radius outside the test function's domain");
  if (p.punctured_origin() && r <= 0.0) throw DomainError("radius must be positive for a punctured profile");
  if (r < p.domain_lo() || r > p.domain_hi()) throw DomainError("radius outside the profile domain");
  const bool even = !p.punctured_origin() && f.even_at_origin;
  return radial_eval(
      [&](const RadialPoint& pt) {
        const Jet w = w_jet(p, pt);
        const Jet u = f.eval(pt.r);
        const Jet lg = curved_laplacian_jet(u, w, pt, n);
        const Jet lg2 = curved_laplacian_jet(lg, w, pt, n);
        // delta = -div_g applied to the 1-form (2/3 R g - 2 Ric)(df, .).
        const Jet scal = scalar_curvature_jet(w, pt, n);
        const Jet rr = ricci_radial_jet(w, pt, n);
        const int k = rr.order();
        const Jet t = (2.0 / 3.0) * scal.truncated(k) * exp(2.0 * w.truncated(k)) - 2.0 * rr;
        const Jet field = t * u.derivative().truncated(k);
        const Jet div = radial_divergence(field, pt, n);
        const int kk = std::min(div.order(), lg2.order());
        return lg2.truncated(kk) - exp(-4.0 * w.truncated(kk)) * div.truncated(kk);
      },
      r, even, kOrder);
}

namespace {

CurvatureFrame basic_frame(const RadialProfile& p, double r) {
  const Dim& dim = p.dim();
  const int n = dim.n;
  CurvatureFrame fr;
  fr.n = n;
  fr.r = r;
  const FlatData f = flat_data(p, r);
  fr.w = f.w;
  fr.grad = Eigen::VectorXd::Zero(n);
  fr.grad[0] = f.d1;
  fr.hess = radial_matrix(n, f.d2, f.d1_over_r);
  fr.lap = f.lap;
  const double g2 = f.d1 * f.d1;
  fr.scalar = -2.0 * (n - 1) * std::exp(-2.0 * f.w) * (f.lap + 0.5 * (n - 2) * g2);
  fr.J = fr.scalar / (2.0 * (n - 1));

  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(n, n);
  outer(0, 0) = g2;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  fr.ricci = (2.0 - n) * fr.hess - f.lap * id + (n - 2.0) * (outer - g2 * id);
  fr.schouten = -fr.hess + outer - 0.5 * g2 * id;

  const Eigen::MatrixXd endo = std::exp(-2.0 * f.w) * fr.schouten;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(endo, Eigen::EigenvaluesOnly);
  fr.eig = es.eigenvalues();
  fr.sigma.resize(dim.m);
  for (int k = 1; k <= dim.m; ++k) fr.sigma[k - 1] = sigma_k(fr, k);
  return fr;
}

}  // namespace

CurvatureFrame curvature_frame(const RadialProfile& p, double r) {
  CurvatureFrame fr = basic_frame(p, r);
  fr.Q = q_curvature_lcf(p, r);
  fr.pfaff_sigma = pfaffian(fr, p, PfaffianRoute::Sigma);
  fr.pfaff_div4 = fr.n == 4 ? pfaffian(fr, p, PfaffianRoute::Div4) : std::numeric_limits<double>::quiet_NaN();
  return fr;
}

namespace {

double div4_bracket(const CurvatureFrame& fr) {
  const double lap = fr.lap;
  const double hess2 = fr.hess.squaredNorm();
  const double hvv = fr.grad.dot(fr.hess * fr.grad);
  const double g2 = fr.grad.squaredNorm();
  return lap * lap - hess2 + 2.0 * hvv + g2 * lap;
}

}  // namespace

double pfaffian(const CurvatureFrame& frame, const RadialProfile& p, PfaffianRoute route) {
  const Dim& dim = p.dim();
  if (frame.n != dim.n) throw DimensionError("frame and profile dimensions differ");
  switch (route) {
    case PfaffianRoute::Sigma:
      return calibration(dim).kappa_sigma * frame.sigma[dim.m - 1];
    case PfaffianRoute::Faf1: {
      require_dim4(p, "faf1 route");
      const double lap_j = eval_at(
          p,
          [&](const RadialPoint& pt) {
            const Jet w = w_jet(p, pt);
            return curved_laplacian_jet(j_curvature_jet(w, pt, 4), w, pt, 4);
          },
          frame.r);
      return dim.c_n * (frame.Q + lap_j);
    }
    case PfaffianRoute::Div4:
      require_dim4(p, "div4 route");
      return dim.c_n * calibration(dim).div4_calib * std::exp(-4.0 * frame.w) * div4_bracket(frame);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

namespace {

// |S^{n-1}| int_a^b h(r) r^{n-1} dr for an even radial expression of the round sphere.
double sphere_radial_integral(const RadialProfile& p, const RadialExpr& expr, double a, double b) {
  const int n = p.dim().n;
  auto h = [&](double r) { return radial_eval(expr, r, true, kOrder) * std::pow(r, n - 1); };
  if (std::isinf(b)) return p.dim().sphere_volume * integrate_to_infinity(h, a, 16.0, 6, 1e-9, 1e-11).value;
  return p.dim().sphere_volume * integrate(h, a, b, 1e-9, 1e-11).value;
}

Calibration measure(const Dim& dim) {
  Calibration c;
  c.n = dim.n;
  const RadialProfile sphere = round_sphere_profile(dim);
  const int n = dim.n;
  const double inf = std::numeric_limits<double>::infinity();

  // Q + Delta_g J integrated against dv_g = e^{nw} dx.
  const double total = sphere_radial_integral(
      sphere,
      [&](const RadialPoint& pt) {
        const Jet w = w_jet(sphere, pt);
        const Jet q = q_curvature_jet(w, pt, dim);
        const Jet lj = curved_laplacian_jet(j_curvature_jet(w, pt, n), w, pt, n);
        const int k = std::min(q.order(), lj.order());
        return exp(static_cast<double>(n) * w.truncated(k)) * (q.truncated(k) + lj.truncated(k));
      },
      0.0, inf);

  auto sigma_m = [&](double r) {
    const CurvatureFrame fr = basic_frame(sphere, r);
    return fr.sigma[dim.m - 1] * std::exp(n * fr.w) * std::pow(r, n - 1);
  };
  const double sig = dim.sphere_volume * integrate_to_infinity(sigma_m, 0.0, 16.0, 6, 1e-9, 1e-11).value;
  c.kappa_sigma = dim.c_n * total / sig;
  c.ratio_sigma_vs_printed = c.kappa_sigma / dim.c_n;

  if (n == 4) {
    const double bracket = sphere_radial_integral(
        sphere, [&](const RadialPoint& pt) { return 2.0 * sigma2_density_jet(w_jet(sphere, pt), pt, n); },
        0.0, inf);
    c.div4_calib = total / bracket;

    // Flux of T(dw, nu) through the unit sphere against int_B e^{4w} sigma_2.
    const double rho = 1.0;
    const Jet wj = sphere.jet_at(rho, 3);
    const double d1 = wj.derivative_value(1), d2 = wj.derivative_value(2);
    const double lap = d2 + (n - 1) * d1 / rho;
    const double flux = dim.sphere_volume * std::pow(rho, n - 1) * (lap + d1 * d1 - d2) * d1;
    const double inside = sphere_radial_integral(
        sphere, [&](const RadialPoint& pt) { return sigma2_density_jet(w_jet(sphere, pt), pt, n); }, 0.0,
        rho);
    c.kappa_div = flux / inside;
  }
  return c;
}

}  // namespace

const Calibration& calibration(const Dim& dim) {
  static std::array<std::once_flag, 5> once;
  static std::array<Calibration, 5> cache;
  const int slot = dim.n / 2;
  std::call_once(once[slot], [&] { cache[slot] = measure(make_dim(dim.n)); });
  return cache[slot];
}

}  // namespace qcurv
