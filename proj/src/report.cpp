#include "qcurv/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "qcurv/averaging.hpp"
#include "qcurv/curvature.hpp"
#include "qcurv/error.hpp"
#include "qcurv/gbc.hpp"
#include "qcurv/kernels.hpp"
#include "qcurv/radial.hpp"
#include "qcurv/radial_ops.hpp"
#include "qcurv/suite.hpp"

namespace qcurv {

using Json = nlohmann::ordered_json;

namespace {

// ---- schema ----

[[noreturn]] void schema(const std::string& what) { throw SchemaError(what); }

void only_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) schema(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) schema("unknown field \"" + key + "\" in " + where);
  }
}

double number(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) schema(where + " needs \"" + key + "\"");
  const Json& v = obj.at(key);
  if (!v.is_number()) schema("\"" + std::string(key) + "\" in " + where + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) schema("\"" + std::string(key) + "\" in " + where + " must be finite");
  return x;
}

bool flag(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) return false;
  if (!obj.at(key).is_boolean()) schema("\"" + std::string(key) + "\" in " + where + " must be a boolean");
  return obj.at(key).get<bool>();
}

std::vector<double> number_array(const Json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_array()) schema("sampled profile needs an array \"" + std::string(key) + "\"");
  std::vector<double> out;
  for (const Json& v : obj.at(key)) {
    if (!v.is_number()) schema("\"" + std::string(key) + "\" must contain only numbers");
    out.push_back(v.get<double>());
    if (!std::isfinite(out.back())) schema("\"" + std::string(key) + "\" must contain finite numbers");
  }
  return out;
}

AnalyticTerm parse_term(const Json& t) {
  if (!t.is_object() || !t.contains("kind") || !t.at("kind").is_string()) schema("each term needs a string \"kind\"");
  const std::string kind = t.at("kind").get<std::string>();
  if (kind == "log1p_sq") {
    only_keys(t, {"kind", "c", "rho"}, "log1p_sq term");
    const double rho = t.contains("rho") ? number(t, "rho", "log1p_sq term") : 1.0;
    if (!(rho > 0.0)) schema("log1p_sq term needs rho > 0");
    return AnalyticTerm::log1p_sq(number(t, "c", "log1p_sq term"), rho);
  }
  if (kind == "log") {
    only_keys(t, {"kind", "c"}, "log term");
    return AnalyticTerm::log(number(t, "c", "log term"));
  }
  if (kind == "power") {
    only_keys(t, {"kind", "c", "p"}, "power term");
    return AnalyticTerm::power(number(t, "c", "power term"), number(t, "p", "power term"));
  }
  schema("unknown term kind \"" + kind + "\"");
}

RadialProfile parse_profile(const Json& p, const Dim& dim) {
  if (!p.is_object() || !p.contains("type") || !p.at("type").is_string()) schema("\"profile\" needs a string \"type\"");
  const std::string type = p.at("type").get<std::string>();
  try {
    if (type == "analytic") {
      only_keys(p, {"type", "punctured_origin", "terms"}, "analytic profile");
      if (!p.contains("terms") || !p.at("terms").is_array()) schema("analytic profile needs an array \"terms\"");
      std::vector<AnalyticTerm> terms;
      for (const Json& t : p.at("terms")) terms.push_back(parse_term(t));
      return RadialProfile::analytic(dim, std::move(terms), flag(p, "punctured_origin", "analytic profile"));
    }
    if (type == "sampled") {
      only_keys(p, {"type", "punctured_origin", "r", "w"}, "sampled profile");
      return RadialProfile::sampled(dim, number_array(p, "r"), number_array(p, "w"),
                                    flag(p, "punctured_origin", "sampled profile"));
    }
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    schema(std::string("profile violates its invariants: ") + e.what());
  }
  schema("unknown profile type \"" + type + "\"");
}

// ---- report scaffolding ----

std::string num(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  if (x == 0.0) x = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json profile_echo(const RadialProfile& p) {
  Json j;
  j["punctured_origin"] = p.punctured_origin();
  if (p.is_analytic()) {
    j["type"] = "analytic";
    Json terms = Json::array();
    for (const AnalyticTerm& t : p.terms()) {
      Json tj;
      tj["kind"] = term_kind_name(t.kind);
      tj["c"] = t.c;
      if (t.kind == AnalyticTerm::Kind::Log1pSq) tj["rho"] = t.param;
      if (t.kind == AnalyticTerm::Kind::Power) tj["p"] = t.param;
      terms.push_back(tj);
    }
    j["terms"] = terms;
  } else {
    j["type"] = "sampled";
    j["samples"] = p.samples().r.size();
    j["r_min"] = p.domain_lo();
    j["r_max"] = p.domain_hi();
  }
  return j;
}

Json calibration_block(const Dim& dim) {
  const Calibration& c = calibration(dim);
  const Calibration& c4 = calibration(make_dim(4));
  Json j;
  j["kappa_n"] = c.kappa_sigma;
  j["kappa_n_over_c_n"] = c.ratio_sigma_vs_printed;
  j["div4_calib"] = c4.div4_calib;
  j["kappa_div"] = c4.kappa_div;
  j["kappa_levelset"] = levelset_kappa();
  return j;
}

Json header(const char* command, const Dim& dim, const RunOptions& opt, const RadialProfile* p) {
  Json j;
  j["command"] = command;
  j["n"] = dim.n;
  j["seed"] = opt.seed;
  j["quadrature_spec"] = {{"radial_nodes", opt.quad.radial_nodes},
                          {"angular_nodes", opt.quad.angular_nodes},
                          {"r_max", opt.quad.r_max},
                          {"eps", opt.quad.eps},
                          {"extrapolation_order", opt.quad.extrapolation_order}};
  j["calibration"] = calibration_block(dim);
  if (p) j["profile"] = profile_echo(*p);
  return j;
}

// CSV preamble carrying the same provenance as the JSON header.
std::string csv_preamble(const Json& h) {
  std::ostringstream os;
  os << "# command=" << h["command"].get<std::string>() << " n=" << h["n"].get<int>()
     << " seed=" << h["seed"].get<std::uint64_t>() << "\n";
  os << "# r_max=" << num(h["quadrature_spec"]["r_max"].get<double>())
     << " eps=" << num(h["quadrature_spec"]["eps"].get<double>())
     << " radial_nodes=" << h["quadrature_spec"]["radial_nodes"].get<int>() << "\n";
  const Json& c = h["calibration"];
  os << "# kappa_n=" << num(c["kappa_n"].get<double>()) << " div4_calib=" << num(c["div4_calib"].get<double>())
     << " kappa_div=" << num(c["kappa_div"].get<double>())
     << " kappa_levelset=" << num(c["kappa_levelset"].get<double>()) << "\n";
  return os.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json matrix(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(row);
  }
  return out;
}

Json vec(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

double outer_radius(const RadialProfile& p, const RunOptions& opt) {
  return p.is_analytic() ? opt.quad.r_max : std::min(opt.quad.r_max, p.domain_hi());
}

double inner_radius(const RadialProfile& p) { return std::max(p.domain_lo(), 0.05); }

}  // namespace

ProfileSpec parse_profile_spec(std::string_view text, int n_override) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    schema(std::string("malformed JSON: ") + e.what());
  }
  only_keys(doc, {"n", "profile", "perturbation"}, "profile specification");
  int n = n_override;
  if (n <= 0) {
    if (!doc.contains("n") || !doc.at("n").is_number_integer()) schema("\"n\" must be an integer");
    n = doc.at("n").get<int>();
  }
  if (n < 2 || n > 8 || n % 2 != 0) schema("\"n\" must be one of 2, 4, 6, 8");
  if (!doc.contains("profile")) schema("missing \"profile\"");
  ProfileSpec spec;
  spec.dim = make_dim(n);
  spec.profile = parse_profile(doc.at("profile"), spec.dim);
  if (doc.contains("perturbation")) {
    const Json& pj = doc.at("perturbation");
    only_keys(pj, {"eps", "power", "envelope"}, "perturbation");
    Perturbation pert;
    pert.eps = number(pj, "eps", "perturbation");
    if (pj.contains("power")) {
      if (!pj.at("power").is_number_integer()) schema("perturbation power must be 1 or 2");
      pert.power = pj.at("power").get<int>();
      if (pert.power != 1 && pert.power != 2) schema("perturbation power must be 1 or 2");
    }
    if (pj.contains("envelope")) {
      if (!pj.at("envelope").is_string()) schema("perturbation envelope must be \"gaussian\" or \"bump\"");
      const std::string env = pj.at("envelope").get<std::string>();
      if (env != "gaussian" && env != "bump") schema("perturbation envelope must be \"gaussian\" or \"bump\"");
      pert.compact = env == "bump";
    }
    spec.perturbation = pert;
  }
  return spec;
}

Report curvature_report(const ProfileSpec& spec, const RunOptions& opt) {
  const RadialProfile& p = spec.profile;
  const int count = opt.nodes > 0 ? opt.nodes : 21;
  std::vector<double> radii;
  if (!p.punctured_origin() && p.domain_lo() == 0.0) {
    radii.push_back(0.0);
    if (count > 1) {
      const auto g = geometric_grid(std::max(count - 1, 2), 0.05, outer_radius(p, opt));
      radii.insert(radii.end(), g.begin(), g.begin() + (count - 1));
    }
  } else {
    radii = geometric_grid(std::max(count, 2), inner_radius(p), outer_radius(p, opt));
    radii.resize(count);
  }

  const int n = spec.dim.n, m = spec.dim.m;
  Json frames = Json::array();
  std::ostringstream csv;
  Json h = header("curvature", spec.dim, opt, &p);
  csv << csv_preamble(h) << "r,w,R,J,Q";
  for (int k = 1; k <= m; ++k) csv << ",sigma_" << k;
  csv << ",pfaff_sigma" << (n == 4 ? ",pfaff_faf1,pfaff_div4" : "") << "\n";
  for (double r : radii) {
    const CurvatureFrame fr = curvature_frame(p, r);
    Json f;
    f["r"] = fr.r;
    f["w"] = fr.w;
    f["grad"] = vec(fr.grad);
    f["hess"] = matrix(fr.hess);
    f["lap"] = fr.lap;
    f["R"] = fr.scalar;
    f["ricci"] = matrix(fr.ricci);
    f["schouten"] = matrix(fr.schouten);
    f["J"] = fr.J;
    f["eig"] = vec(fr.eig);
    f["sigma"] = fr.sigma;
    f["Q"] = fr.Q;
    f["pfaff_sigma"] = fr.pfaff_sigma;
    double faf1 = std::numeric_limits<double>::quiet_NaN();
    if (n == 4) {
      faf1 = pfaffian(fr, p, PfaffianRoute::Faf1);
      f["pfaff_faf1"] = faf1;
      f["pfaff_div4"] = fr.pfaff_div4;
    }
    frames.push_back(f);
    csv << num(fr.r) << "," << num(fr.w) << "," << num(fr.scalar) << "," << num(fr.J) << "," << num(fr.Q);
    for (double s : fr.sigma) csv << "," << num(s);
    csv << "," << num(fr.pfaff_sigma);
    if (n == 4) csv << "," << num(faf1) << "," << num(fr.pfaff_div4);
    csv << "\n";
  }
  if (opt.format == OutputFormat::Csv) return {csv.str(), false};
  h["frames"] = frames;
  return {dump(h), false};
}

Report kernels_report(const ProfileSpec& spec, const RunOptions& opt) {
  const Dim& dim = spec.dim;
  const auto r = geometric_grid(30, 0.1, 10.0), s = geometric_grid(30, 0.105, 10.5);
  const KernelTable t = kernel_table(dim, r, s);
  Json h = header("kernels", dim, opt, &spec.profile);
  if (opt.format == OutputFormat::Csv) {
    std::ostringstream csv;
    csv << csv_preamble(h) << "r,s,II,G,L\n";
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j)
        csv << num(r[i]) << "," << num(s[j]) << "," << num(t.at_II(i, j)) << "," << num(t.at_G(i, j)) << ","
            << num(t.at_L(i, j)) << "\n";
    return {csv.str(), false};
  }

  double asym = 0.0, g_identity = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      asym = std::max(asym, std::abs(kernel_II(s[j], r[i], dim) - t.at_II(i, j)));
      g_identity = std::max(g_identity,
                            std::abs(t.at_G(i, j) - 0.5 - 0.5 * (r[i] * r[i] - s[j] * s[j]) * t.at_II(i, j)));
    }
  Json table;
  table["r"] = r;
  table["s"] = s;
  table["II"] = t.II;
  table["G"] = t.G;
  table["L"] = t.L;
  table["max_asymmetry"] = asym;
  table["max_G_identity_error"] = g_identity;
  h["table"] = table;

  const KernelStructureReport l2 = verify_kernel_structure(dim, {0.5, 1.0, 2.0, 4.0, 8.0}, {0.1, 0.3, 0.7, 1.5, 3.0, 5.0, 9.0});
  h["kernel_structure"] = {{"C", l2.C},         {"C_inner", l2.C_inner},       {"C_outer", l2.C_outer},
                 {"poly", l2.poly},   {"residual", l2.residual},     {"degenerate", l2.degenerate},
                 {"samples", l2.samples}};

  const RadialProfile& p = spec.profile;
  if (p.is_analytic() && !p.punctured_origin()) {
    const double sign = dim.m % 2 == 0 ? 1.0 : -1.0;
    const RadialFn f = sign * laplacian_power_fn(p.as_fn(), dim.n, dim.m);
    const GreensSolution sol = greens_solve(f, dim, opt.quad);
    const RvDotLimits lim = rv_dot_limits(f, dim, opt.quad);
    const GreensBounds l3 = greens_sups(sol, opt.quad.r_max);
    const GreensBounds l3h = greens_sups(sol, 0.5 * opt.quad.r_max);
    double err = 0.0;
    const double w0 = p.eval(0.0);
    for (std::size_t i = 0; i < sol.r.size(); ++i)
      if (sol.r[i] <= opt.quad.r_max) err = std::max(err, std::abs(sol.values[i] - (p.eval(sol.r[i]) - w0)));
    h["greens"] = {{"source", "(-Delta)^m w"},
                   {"max_error_vs_w_minus_w0", err},
                   {"max_residual", sol.max_residual},
                   {"tail_bound", sol.tail_bound},
                   {"rv_dot_at_zero", lim.at_zero},
                   {"rv_dot_at_infinity", lim.at_infinity},
                   {"rv_dot_at_infinity_error", lim.at_infinity_error},
                   {"greens_bounds", {{"r_max", l3.r_max}, {"sup_r_vdot", l3.sup_r_vdot}, {"sup_r2_lap", l3.sup_r2_lap}}},
                   {"greens_bounds_half_window",
                    {{"r_max", l3h.r_max}, {"sup_r_vdot", l3h.sup_r_vdot}, {"sup_r2_lap", l3h.sup_r2_lap}}}};
  } else {
    h["greens"] = nullptr;
  }
  return {dump(h), false};
}

Report ends_report(const ProfileSpec& spec, const RunOptions& opt) {
  const RadialProfile& p = spec.profile;
  std::vector<EndLocation> locs{EndLocation::Infinity};
  if (p.punctured_origin()) locs.push_back(EndLocation::Origin);
  Json h = header("ends", spec.dim, opt, &p);
  Json ends = Json::array();
  std::ostringstream csv;
  csv << csv_preamble(h) << "end,c1,c1_lo,c1_hi,completeness,borderline,equality_case\n";
  for (EndLocation loc : locs) {
    const CompletenessReport c = completeness_check(p, loc);
    const bool eq = equality_case_check(p, loc);
    Json e;
    e["end"] = end_location_name(loc);
    e["c1"] = c.exponent.c1;
    e["c1_interval"] = {c.exponent.lo, c.exponent.hi};
    e["completeness"] = completeness_name(c.verdict);
    e["borderline"] = c.borderline;
    if (c.borderline) {
      e["decay_exponent"] = c.decay_exponent;
      e["projected_sum"] = c.projected_sum;
      e["shells_to_threshold"] = c.shells_to_threshold;
    }
    e["equality_case"] = eq;
    ends.push_back(e);
    csv << end_location_name(loc) << "," << num(c.exponent.c1) << "," << num(c.exponent.lo) << ","
        << num(c.exponent.hi) << "," << completeness_name(c.verdict) << "," << (c.borderline ? 1 : 0) << ","
        << (eq ? 1 : 0) << "\n";
  }
  if (opt.format == OutputFormat::Csv) return {csv.str(), false};
  h["ends"] = ends;
  return {dump(h), false};
}

Report symmetrize_text_report(const ProfileSpec& spec, const RunOptions& opt) {
  const RadialProfile& p = spec.profile;
  const int count = std::max(opt.quad.radial_nodes, 40);
  const double hi = outer_radius(p, opt);
  std::vector<double> grid =
      p.punctured_origin() || p.domain_lo() > 0.0 ? geometric_grid(count, inner_radius(p), hi) : sinh_grid(count, hi);
  const SphericalField field =
      spec.perturbation
          ? perturbed_field(p, spec.perturbation->eps, spec.perturbation->power, spec.perturbation->compact,
                            std::move(grid), opt.quad.angular_nodes)
          : SphericalField::from_profile(p, "radial", std::move(grid), opt.quad.angular_nodes);
  const SymmetrizationReport rep = symmetrize_report(field);
  const double tol = 10 * opt.quad.eps;
  const bool failed = rep.shell_defect >= tol || (rep.sign_checked && !rep.sign_preserved);

  Json h = header("symmetrize", spec.dim, opt, &p);
  if (opt.format == OutputFormat::Csv) {
    std::ostringstream csv;
    csv << csv_preamble(h) << "# shell_defect=" << num(rep.shell_defect) << "\nr,wbar,mean_ratio\n";
    for (std::size_t i = 0; i < rep.ratio.r.size(); ++i)
      csv << num(rep.ratio.r[i]) << "," << num(rep.wbar.eval(rep.ratio.r[i])) << "," << num(rep.ratio.ratio[i])
          << "\n";
    return {csv.str(), failed};
  }
  if (spec.perturbation)
    h["perturbation"] = {{"eps", spec.perturbation->eps},
                         {"power", spec.perturbation->power},
                         {"envelope", spec.perturbation->compact ? "bump" : "gaussian"}};
  h["field_id"] = rep.field_id;
  h["shell_defect"] = rep.shell_defect;
  h["shell_tolerance"] = tol;
  h["sign_checked"] = rep.sign_checked;
  h["sign_preserved"] = rep.sign_preserved;
  h["wbar"] = {{"r", rep.wbar.samples().r}, {"w", rep.wbar.samples().w}};
  h["mean_ratio"] = {{"r", rep.ratio.r}, {"ratio", rep.ratio.ratio}, {"tail", rep.ratio.tail}};
  return {dump(h), failed};
}

namespace {

Json flags_json(const HypothesisFlags& f) {
  Json j;
  j["complete"] = f.complete;
  j["scalar_nonneg"] = f.scalar_nonneg;
  j["q_integrable"] = f.q_integrable;
  j["A4_checked"] = f.bounded_geometry_checked;
  j["bounded_geometry"] = f.bounded_geometry_checked ? Json(f.bounded_geometry) : Json(nullptr);
  j["tail_ratio"] = f.tail_ratio;
  j["worst_gate"] = f.worst_gate;
  if (f.bounded_geometry_checked) {
    j["inf_R"] = f.inf_scalar;
    j["sup_R"] = f.sup_scalar;
    j["sup_grad_R"] = f.sup_grad_scalar;
    j["min_ricci_eigenvalue"] = f.min_ricci;
  }
  return j;
}

}  // namespace

Report gbc_report(const ProfileSpec& spec, const RunOptions& opt) {
  const RadialProfile& p = spec.profile;
  GBCReport rep;
  if (p.punctured_origin()) {
    rep = multi_end_total({make_end("infinity", EndLocation::Infinity, p), make_end("origin", EndLocation::Origin, p)},
                          {{0.0, 2.0, 4.0}, {0.0, 0.5, 1.0}}, p, opt.quad);
  } else {
    rep = verify_gbc_rn(p, opt.quad);
    try {
      const HypothesisFlags bounded_geometry = check_hypotheses(p, HypothesisMode::BoundedGeometry, opt.quad.r_max);
      rep.flags.bounded_geometry_checked = true;
      rep.flags.bounded_geometry = bounded_geometry.bounded_geometry;
      rep.flags.inf_scalar = bounded_geometry.inf_scalar;
      rep.flags.sup_scalar = bounded_geometry.sup_scalar;
      rep.flags.sup_grad_scalar = bounded_geometry.sup_grad_scalar;
      rep.flags.min_ricci = bounded_geometry.min_ricci;
    } catch (const Error&) {
      rep.flags.bounded_geometry_checked = false;
    }
  }
  const bool failed = rep.verdict == Verdict::Violated;
  Json h = header("gbc-verify", spec.dim, opt, &p);
  if (opt.format == OutputFormat::Csv) {
    std::ostringstream csv;
    csv << csv_preamble(h) << "key,value\n";
    csv << "total," << num(rep.total) << "\nbound," << num(rep.bound) << "\nflux," << num(rep.flux)
        << "\nquadrature," << num(rep.quadrature) << "\nverdict," << verdict_name(rep.verdict)
        << "\nequality_expected," << rep.equality_expected << "\nequality_observed," << rep.equality_observed
        << "\ncomplete," << rep.flags.complete << "\nscalar_nonneg," << rep.flags.scalar_nonneg << "\nq_integrable," << rep.flags.q_integrable << "\n";
    for (const auto& c : rep.contributions) csv << "contribution:" << c.label << "," << num(c.flux) << "\n";
    return {csv.str(), failed};
  }
  h["total"] = rep.total;
  h["bound"] = rep.bound;
  h["flux"] = rep.flux;
  h["quadrature"] = rep.quadrature;
  h["tolerance"] = kGbcTolerance;
  h["flags"] = flags_json(rep.flags);
  h["verdict"] = verdict_name(rep.verdict);
  h["equality_expected"] = rep.equality_expected;
  h["equality_observed"] = rep.equality_observed;
  Json contrib = Json::array();
  for (const auto& c : rep.contributions)
    contrib.push_back({{"label", c.label}, {"flux", c.flux}, {"quadrature", c.quadrature}});
  h["contributions"] = contrib;
  return {dump(h), failed};
}

Report levelset_report(const ProfileSpec& spec, const RunOptions& opt) {
  const RadialProfile& p = spec.profile;
  if (spec.dim.n != 4) throw DimensionError("level-set identities are implemented for n = 4");
  const bool truncated = p.punctured_origin() || p.domain_lo() > 0.0;
  const double inner = truncated ? std::max(0.05, 2.0 * p.domain_lo()) : 0.0;
  const double top = std::exp(p.eval(truncated ? 1.0 : 0.0));
  const double kappa = levelset_kappa();

  Json h = header("levelset", spec.dim, opt, &p);
  std::ostringstream csv;
  csv << csv_preamble(h) << "lambda,F,lhs,rhs,inner_flux,defect,radius,lambda_dF,kappa_sigma2,F_defect\n";
  Json levels = Json::array();
  bool failed = false;
  for (double frac : {0.3, 0.4, 0.5, 0.6, 0.7}) {
    const double lam = frac * top;
    const LevelSetFrame fr = f_lambda(p, lam, inner);
    Json lj;
    lj["lambda"] = lam;
    lj["radius"] = fr.radius;
    lj["F"] = fr.F;
    lj["lambda_dF"] = fr.lambda_dF;
    lj["sigma2_integral"] = fr.sigma2_integral;
    lj["kappa_sigma2"] = kappa * fr.sigma2_integral;
    lj["F_defect"] = fr.defect;
    lj["volume_g"] = fr.volume_g;
    lj["area_g"] = fr.area_g;
    // The F identity is stated for U_lambda a ball; on annuli it picks up the inner boundary.
    lj["F_identity_applies"] = !truncated;
    if (!truncated && fr.defect >= 1e-3) failed = true;
    Json ids = Json::array();
    LevelSetIdentity linear;
    for (int k : {0, 1, 2}) {
      RadialFn f;
      f.eval = [k](const Jet& l) {
        Jet out = Jet::constant(1.0, l.order());
        for (int i = 0; i < k; ++i) out = out * l;
        return out;
      };
      const LevelSetIdentity li = levelset_identity(p, f, lam, inner);
      if (k == 1) linear = li;
      if (li.defect >= 1e-3 * (1.0 + std::abs(li.lhs))) failed = true;
      ids.push_back({{"f", k == 0 ? "1" : (k == 1 ? "lambda" : "lambda^2")},
                     {"lhs", li.lhs},
                     {"rhs", li.rhs},
                     {"rhs_printed", li.rhs_printed},
                     {"inner_flux", li.inner_flux},
                     {"defect", li.defect}});
    }
    lj["identities"] = ids;
    levels.push_back(lj);
    csv << num(lam) << "," << num(fr.F) << "," << num(linear.lhs) << "," << num(linear.rhs) << ","
        << num(linear.inner_flux) << "," << num(linear.defect) << "," << num(fr.radius) << "," << num(fr.lambda_dF) << ","
        << num(kappa * fr.sigma2_integral) << "," << num(fr.defect) << "\n";
  }
  if (opt.format == OutputFormat::Csv) return {csv.str(), failed};
  h["inner_radius"] = inner;
  h["orientation"] = kLevelSetOrientation;
  h["levels"] = levels;
  return {dump(h), failed};
}

Report suite_report(const RunOptions& opt) {
  SuiteOptions so;
  so.seed = opt.seed;
  const auto results = run_suite(so);
  bool all = true;
  for (const auto& r : results) all = all && r.pass;
  Json h = header("suite", make_dim(4), opt, nullptr);
  if (opt.format == OutputFormat::Csv) {
    std::ostringstream csv;
    csv << csv_preamble(h) << "id,name,pass,detail\n";
    for (const auto& r : results) csv << r.id << ",\"" << r.name << "\"," << (r.pass ? 1 : 0) << ",\"" << r.detail << "\"\n";
    return {csv.str(), !all};
  }
  Json crit = Json::array();
  for (const auto& r : results) {
    Json m = Json::object();
    for (const auto& [k, v] : r.metrics) m[k] = v;
    crit.push_back({{"id", r.id},
                    {"name", r.name},
                    {"pass", r.pass},
                    {"detail", r.detail},
                    {"budget_seconds", r.budget_seconds},
                    {"metrics", m}});
  }
  h["criteria"] = crit;
  h["all_pass"] = all;
  return {dump(h), !all};
}

Report run_command(std::string_view command, const ProfileSpec* spec, const RunOptions& opt) {
  opt.quad.validate();
  if (command == "suite") return suite_report(opt);
  if (!spec) throw DomainError("command " + std::string(command) + " needs a profile specification");
  if (command == "curvature") return curvature_report(*spec, opt);
  if (command == "kernels") return kernels_report(*spec, opt);
  if (command == "ends") return ends_report(*spec, opt);
  if (command == "symmetrize") return symmetrize_text_report(*spec, opt);
  if (command == "gbc-verify") return gbc_report(*spec, opt);
  if (command == "levelset") return levelset_report(*spec, opt);
  throw DomainError("unknown command " + std::string(command));
}

}  // namespace qcurv
