#include "qcurv/qcurv.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "qcurv/curvature.hpp"
#include "qcurv/error.hpp"
#include "qcurv/gbc.hpp"
#include "qcurv/report.hpp"

struct qc_profile {
  qcurv::ProfileSpec spec;
};

struct qc_options {
  qcurv::RunOptions run;
};

namespace {

thread_local std::string last_error;

qc_status fail(qc_status s, const std::string& what) {
  last_error = what;
  return s;
}

// Runs body, translating exceptions into status codes.
template <class F>
qc_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const qcurv::Error& e) {
    return fail(static_cast<qc_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(QC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QC_ERR_INTERNAL, e.what());
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const qcurv::RunOptions& options_or_default(const qc_options* opt) {
  static const qcurv::RunOptions defaults;
  return opt ? opt->run : defaults;
}

}  // namespace

extern "C" {

int qc_abi_version(void) { return QC_ABI_VERSION; }

const char* qc_status_name(qc_status status) {
  switch (status) {
    case QC_OK: return "ok";
    case QC_ERR_VIOLATION: return "violation";
    case QC_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case QC_ERR_INTERNAL: return "internal";
    default:
      if (status >= QC_ERR_DIMENSION && status <= QC_ERR_SCHEMA)
        return qcurv::error_code_name(static_cast<qcurv::ErrorCode>(status));
      return "unknown";
  }
}

const char* qc_last_error(void) { return last_error.c_str(); }

void qc_string_free(char* s) { std::free(s); }

qc_status qc_constants(int n, double* sphere_volume, double* c_n) {
  return guarded([&] {
    const qcurv::Dim d = qcurv::make_dim(n);
    if (sphere_volume) *sphere_volume = d.sphere_volume;
    if (c_n) *c_n = d.c_n;
    return QC_OK;
  });
}

qc_status qc_options_create(qc_options** out) {
  if (!out) return fail(QC_ERR_INVALID_ARGUMENT, "null output pointer");
  return guarded([&] {
    *out = new qc_options{};
    return QC_OK;
  });
}

void qc_options_free(qc_options* opt) { delete opt; }

qc_status qc_options_set_seed(qc_options* opt, uint64_t seed) {
  if (!opt) return fail(QC_ERR_INVALID_ARGUMENT, "null options");
  opt->run.seed = seed;
  return QC_OK;
}

qc_status qc_options_set_rmax(qc_options* opt, double r_max) {
  if (!opt) return fail(QC_ERR_INVALID_ARGUMENT, "null options");
  if (!(r_max > 1.0)) return fail(QC_ERR_DOMAIN, "outer cutoff r_max must exceed 1");
  opt->run.quad.r_max = r_max;
  return QC_OK;
}

qc_status qc_options_set_nodes(qc_options* opt, int nodes) {
  if (!opt) return fail(QC_ERR_INVALID_ARGUMENT, "null options");
  if (nodes < 4) return fail(QC_ERR_DOMAIN, "node count must be at least 4");
  opt->run.quad.radial_nodes = nodes;
  opt->run.nodes = nodes;
  return QC_OK;
}

qc_status qc_options_set_tol(qc_options* opt, double eps) {
  if (!opt) return fail(QC_ERR_INVALID_ARGUMENT, "null options");
  if (!(eps > 0.0)) return fail(QC_ERR_DOMAIN, "tolerance must be positive");
  opt->run.quad.eps = eps;
  return QC_OK;
}

qc_status qc_options_set_format(qc_options* opt, qc_format format) {
  if (!opt) return fail(QC_ERR_INVALID_ARGUMENT, "null options");
  if (format != QC_FORMAT_JSON && format != QC_FORMAT_CSV) return fail(QC_ERR_INVALID_ARGUMENT, "unknown format");
  opt->run.format = format == QC_FORMAT_CSV ? qcurv::OutputFormat::Csv : qcurv::OutputFormat::Json;
  return QC_OK;
}

qc_status qc_profile_parse(const char* json, int n_override, qc_profile** out) {
  if (!json || !out) return fail(QC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new qc_profile{qcurv::parse_profile_spec(json, n_override)};
    return QC_OK;
  });
}

qc_status qc_profile_analytic(int n, const qc_term* terms, size_t count, int punctured, qc_profile** out) {
  if (!out || (count > 0 && !terms)) return fail(QC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const qcurv::Dim d = qcurv::make_dim(n);
    std::vector<qcurv::AnalyticTerm> ts;
    for (size_t i = 0; i < count; ++i) {
      switch (terms[i].kind) {
        case QC_TERM_LOG1P_SQ: ts.push_back(qcurv::AnalyticTerm::log1p_sq(terms[i].c, terms[i].param)); break;
        case QC_TERM_LOG: ts.push_back(qcurv::AnalyticTerm::log(terms[i].c)); break;
        case QC_TERM_POWER: ts.push_back(qcurv::AnalyticTerm::power(terms[i].c, terms[i].param)); break;
        default: return fail(QC_ERR_INVALID_ARGUMENT, "unknown term kind");
      }
    }
    *out = new qc_profile{{d, qcurv::RadialProfile::analytic(d, std::move(ts), punctured != 0), std::nullopt}};
    return QC_OK;
  });
}

qc_status qc_profile_sampled(int n, const double* r, const double* w, size_t count, int punctured,
                             qc_profile** out) {
  if (!out || !r || !w) return fail(QC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const qcurv::Dim d = qcurv::make_dim(n);
    *out = new qc_profile{{d,
                           qcurv::RadialProfile::sampled(d, std::vector<double>(r, r + count),
                                                         std::vector<double>(w, w + count), punctured != 0),
                           std::nullopt}};
    return QC_OK;
  });
}

void qc_profile_free(qc_profile* p) { delete p; }

int qc_profile_dimension(const qc_profile* p) { return p ? p->spec.dim.n : 0; }

qc_status qc_profile_eval(const qc_profile* p, double r, int order, double* out) {
  if (!p || !out) return fail(QC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = p->spec.profile.eval(r, order);
    return QC_OK;
  });
}

qc_status qc_scalar_curvature(const qc_profile* p, double r, double* out) {
  if (!p || !out) return fail(QC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = qcurv::scalar_curvature(p->spec.profile, r);
    return QC_OK;
  });
}

qc_status qc_q_curvature(const qc_profile* p, double r, double* out) {
  if (!p || !out) return fail(QC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = qcurv::q_curvature_lcf(p->spec.profile, r);
    return QC_OK;
  });
}

qc_status qc_total_q(const qc_profile* p, const qc_options* opt, double* total, double* flux, double* quadrature) {
  if (!p || !total) return fail(QC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const qcurv::TotalQ t = qcurv::total_q_routes(p->spec.profile, options_or_default(opt).quad);
    *total = t.value;
    if (flux) *flux = t.flux;
    if (quadrature) *quadrature = t.quadrature;
    return QC_OK;
  });
}

qc_status qc_verify_gbc(const qc_profile* p, const qc_options* opt, qc_gbc_result* out) {
  if (!p || !out) return fail(QC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& prof = p->spec.profile;
    const auto& quad = options_or_default(opt).quad;
    const qcurv::GBCReport r =
        prof.punctured_origin()
            ? qcurv::multi_end_total({qcurv::make_end("infinity", qcurv::EndLocation::Infinity, prof),
                                      qcurv::make_end("origin", qcurv::EndLocation::Origin, prof)},
                                     {{0.0, 2.0, 4.0}, {0.0, 0.5, 1.0}}, prof, quad)
            : qcurv::verify_gbc_rn(prof, quad);
    out->total = r.total;
    out->bound = r.bound;
    out->flux = r.flux;
    out->quadrature = r.quadrature;
    out->complete = r.flags.complete;
    out->scalar_nonneg = r.flags.scalar_nonneg;
    out->q_integrable = r.flags.q_integrable;
    out->verdict = r.verdict == qcurv::Verdict::Satisfied ? QC_SATISFIED
                   : r.verdict == qcurv::Verdict::Violated ? QC_VIOLATED
                                                          : QC_HYPOTHESES_NOT_MET;
    out->equality_expected = r.equality_expected;
    out->equality_observed = r.equality_observed;
    return r.verdict == qcurv::Verdict::Violated ? fail(QC_ERR_VIOLATION, "inequality violated") : QC_OK;
  });
}

qc_status qc_run(const char* command, const qc_profile* p, const qc_options* opt, char** out) {
  if (!command || !out) return fail(QC_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const qcurv::Report rep = qcurv::run_command(command, p ? &p->spec : nullptr, options_or_default(opt));
    *out = copy_string(rep.text);
    return rep.failed ? fail(QC_ERR_VIOLATION, std::string(command) + ": a check failed; see the report") : QC_OK;
  });
}

}  // extern "C"
