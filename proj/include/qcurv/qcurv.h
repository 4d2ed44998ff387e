#ifndef QCURV_QCURV_H
#define QCURV_QCURV_H

/* C interface to the qcurv library. All handles are opaque; every call that
 * can fail returns a qc_status and leaves a message for qc_last_error() on
 * the calling thread. Strings returned through char** are owned by the
 * caller and released with qc_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QC_API __declspec(dllexport)
#else
#define QC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define QC_ABI_VERSION 1

typedef enum qc_status {
  QC_OK = 0,
  QC_ERR_DIMENSION = 1,
  QC_ERR_DOMAIN = 2,
  QC_ERR_ORDER = 3,
  QC_ERR_INDEX = 4,
  QC_ERR_QUADRATURE = 5,
  QC_ERR_STRUCTURE = 6,
  QC_ERR_INTEGRABILITY = 7,
  QC_ERR_LIMIT = 8,
  QC_ERR_CONSISTENCY = 9,
  QC_ERR_NOT_POLYHARMONIC = 10,
  QC_ERR_RESOLUTION = 11,
  QC_ERR_PRECONDITION = 12,
  QC_ERR_DECOMPOSITION = 13,
  QC_ERR_CUTOFF = 14,
  QC_ERR_LEVEL_SET = 15,
  QC_ERR_SCHEMA = 16,
  /* The report was produced, but a verdict, identity or criterion failed. */
  QC_ERR_VIOLATION = 17,
  QC_ERR_INVALID_ARGUMENT = 18,
  QC_ERR_INTERNAL = 19
} qc_status;

typedef enum qc_format { QC_FORMAT_JSON = 0, QC_FORMAT_CSV = 1 } qc_format;

typedef enum qc_term_kind { QC_TERM_LOG1P_SQ = 0, QC_TERM_LOG = 1, QC_TERM_POWER = 2 } qc_term_kind;

/* c ln(1 + r^2/rho^2), c ln r, or c r^p; `param` is rho or p. */
typedef struct qc_term {
  qc_term_kind kind;
  double c;
  double param;
} qc_term;

typedef enum qc_verdict { QC_SATISFIED = 0, QC_VIOLATED = 1, QC_HYPOTHESES_NOT_MET = 2 } qc_verdict;

typedef struct qc_gbc_result {
  double total;
  double bound;
  double flux;
  double quadrature;
  int complete, scalar_nonneg, q_integrable;
  qc_verdict verdict;
  int equality_expected;
  int equality_observed;
} qc_gbc_result;

typedef struct qc_profile qc_profile;
typedef struct qc_options qc_options;

QC_API int qc_abi_version(void);
QC_API const char* qc_status_name(qc_status status);
/* Message of the last failed call on this thread ("" if none). */
QC_API const char* qc_last_error(void);
QC_API void qc_string_free(char* s);

/* |S^{n-1}| and C_n for n in {2, 4, 6, 8}. */
QC_API qc_status qc_constants(int n, double* sphere_volume, double* c_n);

/* ---- options ---- */
QC_API qc_status qc_options_create(qc_options** out);
QC_API void qc_options_free(qc_options* opt);
QC_API qc_status qc_options_set_seed(qc_options* opt, uint64_t seed);
QC_API qc_status qc_options_set_rmax(qc_options* opt, double r_max);
QC_API qc_status qc_options_set_nodes(qc_options* opt, int nodes);
QC_API qc_status qc_options_set_tol(qc_options* opt, double eps);
QC_API qc_status qc_options_set_format(qc_options* opt, qc_format format);

/* ---- profiles ---- */
/* Parses a profile specification; n_override > 0 replaces its "n". */
QC_API qc_status qc_profile_parse(const char* json, int n_override, qc_profile** out);
QC_API qc_status qc_profile_analytic(int n, const qc_term* terms, size_t count, int punctured, qc_profile** out);
QC_API qc_status qc_profile_sampled(int n, const double* r, const double* w, size_t count, int punctured,
                                    qc_profile** out);
QC_API void qc_profile_free(qc_profile* p);
QC_API int qc_profile_dimension(const qc_profile* p);
QC_API qc_status qc_profile_eval(const qc_profile* p, double r, int order, double* out);

/* ---- pointwise and total curvature ---- */
QC_API qc_status qc_scalar_curvature(const qc_profile* p, double r, double* out);
QC_API qc_status qc_q_curvature(const qc_profile* p, double r, double* out);
/* C_n int Q dv_g by the flux route; flux and quadrature may be NULL. */
QC_API qc_status qc_total_q(const qc_profile* p, const qc_options* opt, double* total, double* flux,
                            double* quadrature);
/* Single-end check for smooth profiles; two-end check for punctured ones. */
QC_API qc_status qc_verify_gbc(const qc_profile* p, const qc_options* opt, qc_gbc_result* out);

/* ---- reports ----
 * command: "curvature", "kernels", "ends", "symmetrize", "gbc-verify",
 * "levelset" or "suite" (the profile may be NULL for "suite"). On
 * QC_OK and QC_ERR_VIOLATION *out holds the report text. */
QC_API qc_status qc_run(const char* command, const qc_profile* p, const qc_options* opt, char** out);

#ifdef __cplusplus
}
#endif

#endif
