#include "qcurv/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "qcurv/curvature.hpp"
#include "qcurv/kernels.hpp"
#include "qcurv/radial.hpp"
#include "qcurv/radial_ops.hpp"
#include "qcurv/spline.hpp"

namespace qcurv {

SphericalField SphericalField::from_function(const Dim& dim, std::string id, std::vector<double> r, int angular_nodes,
                                             const std::function<double(double, double)>& fn) {
  SphericalField f;
  f.dim = dim;
  f.id = std::move(id);
  f.r = std::move(r);
  f.rule = gegenbauer_gauss(angular_nodes, dim);
  f.w.resize(f.r.size() * f.rule.x.size());
  for (std::size_t i = 0; i < f.r.size(); ++i)
    for (std::size_t j = 0; j < f.rule.x.size(); ++j) f.w[i * f.rule.x.size() + j] = fn(f.r[i], f.rule.theta[j]);
  f.validate();
  return f;
}

SphericalField SphericalField::from_profile(const RadialProfile& p, std::string id, std::vector<double> r,
                                            int angular_nodes) {
  return from_function(p.dim(), std::move(id), std::move(r), angular_nodes,
                       [&](double rr, double) { return p.eval(rr); });
}

void SphericalField::validate() const {
  if (r.size() < 8) throw DomainError("spherical field needs at least 8 radii");
  if (r.front() < 0.0) throw DomainError("spherical field radii must be non-negative");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw DomainError("spherical field radii must be strictly increasing");
  const std::size_t nj = rule.x.size();
  if (nj < 4 || rule.theta.size() != nj || rule.weight.size() != nj)
    throw DomainError("spherical field needs a polar rule with at least 4 nodes");
  double sum = 0.0;
  for (double wt : rule.weight) {
    if (!(wt > 0.0)) throw DomainError("polar weights must be positive");
    sum += wt;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw DomainError("polar weights must sum to one");
  if (w.size() != r.size() * nj) throw DomainError("spherical field value array has the wrong size");
  if (!axisymmetric) throw DomainError("only axisymmetric fields are supported");
  if (r.front() == 0.0)
    for (std::size_t j = 1; j < nj; ++j)
      if (std::abs(w[j] - w[0]) > 1e-12 * (1.0 + std::abs(w[0])))
        throw DomainError("field is not single-valued at the origin");
}

namespace {

double polar_mean(const SphericalField& f, std::size_t i) {
  double acc = 0.0;
  for (std::size_t j = 0; j < f.angular_count(); ++j) acc += f.rule.weight[j] * f.at(i, j);
  return acc;
}

// Angular basis P_l(cos theta) with its theta-derivative; Laplace-Beltrami
// eigenvalue -l(l + n - 2).
struct AngularBasis {
  std::vector<std::vector<double>> value, dtheta;  // [j][l]
  std::vector<double> norm;                        // sum_j weight_j P_l(x_j)^2
};

AngularBasis angular_basis(const SphericalField& f, int lmax) {
  const double lambda = 0.5 * (f.dim.n - 2);
  AngularBasis b;
  const std::size_t nj = f.angular_count();
  b.value.resize(nj);
  b.dtheta.resize(nj);
  b.norm.assign(lmax + 1, 0.0);
  for (std::size_t j = 0; j < nj; ++j) {
    const double th = f.rule.theta[j];
    auto& v = b.value[j];
    auto& d = b.dtheta[j];
    v.resize(lmax + 1);
    d.resize(lmax + 1);
    if (lambda == 0.0) {
      for (int l = 0; l <= lmax; ++l) {
        v[l] = std::cos(l * th);
        d[l] = -l * std::sin(l * th);
      }
    } else {
      v = gegenbauer_values(lmax, lambda, f.rule.x[j]);
      const auto up = gegenbauer_values(std::max(lmax - 1, 0), lambda + 1.0, f.rule.x[j]);
      d[0] = 0.0;
      for (int l = 1; l <= lmax; ++l) d[l] = -std::sin(th) * 2.0 * lambda * up[l - 1];
    }
    for (int l = 0; l <= lmax; ++l) b.norm[l] += f.rule.weight[j] * v[l] * v[l];
  }
  return b;
}

struct ModalField {
  int lmax = 0;
  AngularBasis basis;
  std::vector<std::shared_ptr<const BSplineInterpolant>> modes;
};

ModalField modal_expansion(const SphericalField& f) {
  f.validate();
  ModalField mf;
  const std::size_t nj = f.angular_count();
  mf.lmax = static_cast<int>(nj) - 1;
  mf.basis = angular_basis(f, mf.lmax);

  const std::size_t ni = f.r.size();
  std::vector<std::vector<double>> coef(mf.lmax + 1, std::vector<double>(ni, 0.0));
  double scale = 0.0;
  std::vector<double> amplitude(mf.lmax + 1, 0.0);
  for (int l = 0; l <= mf.lmax; ++l) {
    for (std::size_t i = 0; i < ni; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < nj; ++j) acc += f.rule.weight[j] * f.at(i, j) * mf.basis.value[j][l];
      coef[l][i] = l == 0 ? polar_mean(f, i) : acc / mf.basis.norm[l];
      amplitude[l] = std::max(amplitude[l], std::abs(coef[l][i]) * std::sqrt(mf.basis.norm[l]));
    }
    scale = std::max(scale, amplitude[l]);
  }
  const int tail_from = mf.lmax + 1 - std::max(2, static_cast<int>(nj) / 4);
  for (int l = tail_from; l <= mf.lmax; ++l)
    if (amplitude[l] > kModeTailTolerance * std::max(scale, 1e-300) && amplitude[l] > 1e-300)
      throw ResolutionError("angular mode " + std::to_string(l) + " carries relative weight " +
                            std::to_string(amplitude[l] / scale) + "; increase the angular node count");

  const int degree = sampled_spline_degree(f.dim);
  for (int l = 0; l <= mf.lmax; ++l) {
    std::vector<double> xs, ys;
    const double parity = l % 2 == 0 ? 1.0 : -1.0;
    if (f.r.front() == 0.0) {
      for (std::size_t i = ni; i-- > 0;) {
        if (f.r[i] == 0.0) continue;
        xs.push_back(-f.r[i]);
        ys.push_back(parity * coef[l][i]);
      }
    }
    for (std::size_t i = 0; i < ni; ++i) {
      xs.push_back(f.r[i]);
      ys.push_back(coef[l][i]);
    }
    mf.modes.push_back(std::make_shared<const BSplineInterpolant>(xs, ys, degree));
  }
  return mf;
}

Jet mode_jet(const ModalField& mf, int l, double r, int order) {
  std::vector<double> d(order + 1);
  mf.modes[l]->derivatives(r, order, d);
  return Jet::from_derivatives(d);
}

// Delta^m of mode l at r > 0, together with value, first derivative and Laplacian.
struct ModeData {
  double value, d1, lap, lap_m;
};

ModeData mode_data(const ModalField& mf, int l, double r, const Dim& dim) {
  const int order = 2 * dim.m + 2;
  const RadialPoint pt(r, order);
  const Jet u = mode_jet(mf, l, r, order);
  Jet acc = u;
  double lap = 0.0;
  for (int k = 0; k < dim.m; ++k) {
    acc = flat_laplacian_mode(acc, pt, dim.n, l);
    if (k == 0) lap = acc.value();
  }
  return {u.value(), u.derivative_value(1), lap, acc.value()};
}

}  // namespace

SphericalField perturbed_field(const RadialProfile& base, double eps, int power, bool compact,
                               std::vector<double> r, int angular_nodes) {
  if (power != 1 && power != 2) throw DomainError("perturbation power must be 1 or 2");
  auto eta = [=](double x) {
    const double lead = power == 1 ? x : x * x;
    if (!compact) return lead * std::exp(-0.25 * x * x);
    const double s = x / 3.0;
    return s < 1.0 ? lead * std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
  };
  return SphericalField::from_function(base.dim(), "perturbed", std::move(r), angular_nodes, [&](double x, double t) {
    const double c = std::cos(t);
    return base.eval(x) + eps * (power == 1 ? c : c * c) * eta(x);
  });
}

RadialProfile spherical_symmetrize(const SphericalField& field) {
  field.validate();
  std::vector<double> wbar(field.r.size());
  for (std::size_t i = 0; i < field.r.size(); ++i) wbar[i] = polar_mean(field, i);
  return RadialProfile::sampled(field.dim, field.r, std::move(wbar), field.r.front() > 0.0);
}

ShellDefect verify_shell_equality(const SphericalField& field) {
  const ModalField mf = modal_expansion(field);
  const RadialProfile wbar = spherical_symmetrize(field);
  const Dim& dim = field.dim;
  ShellDefect out;
  const double r_hi = 0.9 * field.r.back();
  for (double r : field.r) {
    if (r < 0.05 || r > r_hi) continue;
    std::vector<double> lap_m(mf.lmax + 1);
    for (int l = 0; l <= mf.lmax; ++l) lap_m[l] = mode_data(mf, l, r, dim).lap_m;
    double mean = 0.0;
    for (std::size_t j = 0; j < field.angular_count(); ++j) {
      double pointwise = 0.0;
      for (int l = 0; l <= mf.lmax; ++l) pointwise += lap_m[l] * mf.basis.value[j][l];
      mean += field.rule.weight[j] * pointwise;
    }
    const double area = dim.sphere_volume * std::pow(r, dim.n - 1);
    const double shell_field = area * mean;
    const double shell_mean = area * radial_delta_power(wbar, dim.m, r);
    out.r.push_back(r);
    out.shell_field.push_back(shell_field);
    out.shell_mean.push_back(shell_mean);
    out.max_defect = std::max(out.max_defect, std::abs(shell_field - shell_mean));
  }
  if (out.r.empty()) throw DomainError("no radii in the shell-comparison window");
  return out;
}

std::vector<double> field_sign_gate(const SphericalField& field) {
  const ModalField mf = modal_expansion(field);
  const Dim& dim = field.dim;
  const std::size_t nj = field.angular_count();
  std::vector<double> gate(field.r.size() * nj, 0.0);
  for (std::size_t i = 0; i < field.r.size(); ++i) {
    const double r = field.r[i];
    if (r <= 0.0) continue;
    std::vector<ModeData> md(mf.lmax + 1);
    for (int l = 0; l <= mf.lmax; ++l) md[l] = mode_data(mf, l, r, dim);
    for (std::size_t j = 0; j < nj; ++j) {
      double wr = 0.0, wt = 0.0, lap = 0.0;
      for (int l = 0; l <= mf.lmax; ++l) {
        wr += md[l].d1 * mf.basis.value[j][l];
        wt += md[l].value * mf.basis.dtheta[j][l];
        lap += md[l].lap * mf.basis.value[j][l];
      }
      gate[i * nj + j] = lap + (dim.m - 1) * (wr * wr + wt * wt / (r * r));
    }
  }
  return gate;
}

namespace {
constexpr double kGateSlack = 1e-10;
}

bool verify_sign_preservation(const SphericalField& field) {
  const auto gate = field_sign_gate(field);
  const double worst = *std::max_element(gate.begin(), gate.end());
  if (worst > kGateSlack)
    throw PreconditionError("input violates Delta w + (m-1)|grad w|^2 <= 0 (max " + std::to_string(worst) + ")");
  const RadialProfile wbar = spherical_symmetrize(field);
  for (double r : field.r) {
    if (r <= 0.0 && wbar.punctured_origin()) continue;
    if (scalar_sign_gate(wbar, r) > kGateSlack) return false;
  }
  return true;
}

RatioCurve mean_ratio(const SphericalField& field) {
  field.validate();
  RatioCurve c;
  for (std::size_t i = 0; i < field.r.size(); ++i) {
    const double wbar = polar_mean(field, i);
    double acc = 0.0;
    for (std::size_t j = 0; j < field.angular_count(); ++j)
      acc += field.rule.weight[j] * std::exp(field.at(i, j) - wbar);
    c.r.push_back(field.r[i]);
    c.ratio.push_back(acc);
  }
  c.tail = c.ratio.back();
  const std::size_t n = c.ratio.size();
  const double d1 = std::abs(c.ratio[n - 1] - c.ratio[n - 2]);
  const double d2 = std::abs(c.ratio[n - 2] - c.ratio[n - 3]);
  if (d1 > d2 && d1 > 1e-12 && std::abs(c.tail - 1.0) > 1e-3)
    throw LimitError("e^{-w-bar} mean(e^w) does not settle at the outer radii");
  return c;
}

SymmetrizationReport symmetrize_report(const SphericalField& field) {
  SymmetrizationReport rep{field.id, spherical_symmetrize(field), 0.0, false, false, {}};
  rep.shell_defect = verify_shell_equality(field).max_defect;
  try {
    rep.sign_preserved = verify_sign_preservation(field);
    rep.sign_checked = true;
  } catch (const PreconditionError&) {
    rep.sign_checked = false;
  }
  rep.ratio = mean_ratio(field);
  return rep;
}

ProbeReport constancy_probe(const RadialProfile& w, const QuadratureSpec& quad) {
  if (w.punctured_origin()) throw DomainError("constancy probe needs a profile smooth at the origin");
  const Dim& dim = w.dim();
  const double sign = dim.m % 2 == 0 ? 1.0 : -1.0;
  const RadialFn f = sign * laplacian_power_fn(w.as_fn(), dim.n, dim.m);
  const GreensSolution sol = greens_solve(f, dim, quad);
  auto u = [&](double r) { return w.eval(r) - sol.v.eval(r); };

  ProbeReport rep;
  const double rho_hi = 0.5 * quad.r_max;
  for (double c : {0.0, 1.0, -1.0}) {
    auto mean_about = [&](double rho) {
      return sphere_mean(
          [&](double th) { return u(std::sqrt(c * c + rho * rho + 2.0 * c * rho * std::cos(th))); }, dim, 0.0,
          1e-12);
    };
    const double base = mean_about(0.1);
    double dev = 0.0;
    for (double rho = 0.1; rho <= rho_hi; rho *= 1.5) dev = std::max(dev, std::abs(mean_about(rho) - base));
    rep.center.push_back(c);
    rep.deviation.push_back(dev);
    rep.max_deviation = std::max(rep.max_deviation, dev);
  }
  return rep;
}

namespace {
constexpr double kProbeRadius = 1e3;
}

ConstancyReport constancy_check(const RadialProfile& p, double r_lo, double r_hi) {
  const Dim& dim = p.dim();
  ConstancyReport rep;
  rep.min_scalar = std::numeric_limits<double>::infinity();
  constexpr int kCount = 32;
  std::vector<double> r, w;
  for (int i = 0; i < kCount; ++i) r.push_back(r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (kCount - 1)));
  std::vector<double> probe;
  for (int i = 0; i < 2 * kCount; ++i)
    probe.push_back(r_lo * std::pow(kProbeRadius / r_lo, static_cast<double>(i) / (2 * kCount - 1)));
  if (!p.punctured_origin()) probe.push_back(0.0);
  double worst_gate = -std::numeric_limits<double>::infinity();
  for (double x : probe) {
    const double lap_m = radial_delta_power(p, dim.m, x);
    if (lap_m != 0.0) rep.max_abs_q = std::max(rep.max_abs_q, std::exp(-dim.n * p.eval(x)) * std::abs(lap_m));
    rep.min_scalar = std::min(rep.min_scalar, scalar_curvature(p, x));
    worst_gate = std::max(worst_gate, scalar_sign_gate(p, x));
  }
  rep.hypotheses_hold = rep.max_abs_q < 1e-8 && worst_gate <= 1e-12;
  for (double x : r) w.push_back(p.eval(x));
  Decomposition dec;
  try {
    dec = basis_decompose(r, w, dim, 1e-6, 1e-12);
  } catch (const NotPolyharmonic&) {
    return rep;
  }
  rep.coefficients = dec.coefficients;
  for (std::size_t j = 1; j < dec.coefficients.size(); ++j)
    rep.max_nonconstant = std::max(rep.max_nonconstant, std::abs(dec.coefficients[j]));
  rep.constant = rep.max_nonconstant < 1e-4;
  return rep;
}

}  // namespace qcurv
