/* C interface to the qst library. All handles are opaque; every call
 * returns a qst_status and leaves a message for qst_last_error() on failure.
 * Strings returned through char** are owned by the caller and released
 * with qst_string_free. */
#ifndef QST_QST_H
#define QST_QST_H

#include <stddef.h>

#if defined(QST_BUILDING_LIBRARY)
#define QST_API __attribute__((visibility("default")))
#else
#define QST_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qst_status {
  QST_OK = 0,
  QST_VIOLATION = 1, /* a mathematical check failed */
  QST_ERR_CONFIG = 2,
  QST_ERR_IO = 3,
  QST_ERR_ARGUMENT = 4,
  QST_ERR_HYPOTHESIS = 5,
  QST_ERR_CONVERGENCE = 6,
  QST_ERR_SINGULAR = 7,
  QST_ERR_DEGENERATE_PAIRING = 8,
  QST_ERR_TAG_MISMATCH = 9,
  QST_ERR_RANGE = 10,
  QST_ERR_BOUNDARY_RULE = 11,
  QST_ERR_INTERNAL = 99
} qst_status;

typedef struct qst_session qst_session;
typedef struct qst_mode qst_mode;

QST_API const char* qst_version(void);
/* Message of the last failed call on this thread, "" if none. */
QST_API const char* qst_last_error(void);
QST_API void qst_string_free(char* s);

/* A session holds the parsed experiment config (families, boundary rule,
 * tolerances). A NULL or empty JSON text means the built-in defaults. */
QST_API qst_status qst_session_from_json(const char* config_json, qst_session** out);
QST_API qst_status qst_session_from_file(const char* path, qst_session** out);
QST_API void qst_session_free(qst_session* s);

QST_API qst_status qst_weight(const qst_session* s, int n, long long k, double* out);
QST_API qst_status qst_s(const qst_session* s, int n, double* out);

/* Kernel solutions I, K of mode (m, n) on k = 0..k_max. */
QST_API qst_status qst_mode_solve(const qst_session* s, int m, int n, long long k_max,
                                  qst_mode** out);
QST_API void qst_mode_free(qst_mode* mode);
QST_API long long qst_mode_k_max(const qst_mode* mode);
QST_API qst_status qst_mode_tau(const qst_mode* mode, double* out);
QST_API qst_status qst_mode_epsilon(const qst_mode* mode, double* out);
/* Each output array, when non-NULL, receives k_max + 1 values. */
QST_API qst_status qst_mode_kernel(const qst_mode* mode, double* I1, double* I2, double* K1,
                                   double* K2);

/* Mode system: g, f of length len + 1 give r1, r2 of length len and q0. */
QST_API qst_status qst_apply_A(const qst_mode* mode, const double* g, const double* f,
                               size_t len, double* r1, double* r2, double* q0);
/* Parametrix: r1, r2 of length len <= k_max; g, f receive k_max + 1 values.
 * beta and boundary_residual may be NULL. */
QST_API qst_status qst_apply_Q(const qst_mode* mode, const double* r1, const double* r2,
                               size_t len, double q0, double* g, double* f, double* beta,
                               double* boundary_residual);
/* HS report of the mode as JSON. */
QST_API qst_status qst_mode_hs_json(const qst_mode* mode, char** out);

/* Runs validate | solve | scan | dump. options_json keys: config, out,
 * seed, modes, kmax, rhs, write_files. exit_code receives 0, 1 or 2 and
 * report_json (may be NULL) the command report. The return value is QST_OK
 * whenever the command ran to a verdict. */
QST_API qst_status qst_command(const char* command, const char* options_json, int* exit_code,
                               char** report_json);

#ifdef __cplusplus
}
#endif

#endif
