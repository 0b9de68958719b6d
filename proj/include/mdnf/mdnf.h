#ifndef MDNF_H
#define MDNF_H

/* C interface to the normal-form library.
 *
 * All functions return an mdnf_status; on failure the message is available
 * from mdnf_last_error() (per thread, valid until the next call on that
 * thread).  Strings returned through char** are owned by the caller and must
 * be released with mdnf_string_free().  A session is not thread-safe. */

#include <stddef.h>

#if defined(_WIN32)
#define MDNF_API __declspec(dllexport)
#elif defined(__GNUC__)
#define MDNF_API __attribute__((visibility("default")))
#else
#define MDNF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdnf_status {
  MDNF_OK = 0,
  MDNF_SYNTAX_ERROR,
  MDNF_UNKNOWN_IDENTIFIER,
  MDNF_EMPTY_INPUT,
  MDNF_DOMAIN_ERROR,
  MDNF_NON_DIFFERENTIABLE,
  MDNF_MAX_SUBDIVISIONS,
  MDNF_NO_BRACKET,
  MDNF_TARGET_OUT_OF_RANGE,
  MDNF_NON_MONOTONE_DETECTED,
  MDNF_SINGULAR_JACOBIAN,
  MDNF_NO_CONVERGENCE,
  MDNF_NOT_CRITICAL,
  MDNF_DEGENERATE_CRITICAL,
  MDNF_NOT_REGULAR,
  MDNF_NON_POSITIVE_DENSITY,
  MDNF_OUTSIDE_CHART_DOMAIN,
  MDNF_REGION_OUTSIDE_DOMAIN,
  MDNF_MONOTONICITY_VIOLATION,
  MDNF_STEP_LIMIT_EXCEEDED,
  MDNF_INVALID_ARGUMENT,
  MDNF_CONFIG_ERROR,
  MDNF_IO_ERROR,
  MDNF_INTERNAL_ERROR
} mdnf_status;

typedef enum mdnf_format { MDNF_FORMAT_CSV = 1, MDNF_FORMAT_JSON = 2 } mdnf_format;

typedef struct mdnf_session mdnf_session;

typedef struct mdnf_check_report {
  int admissible;
  mdnf_status failure; /* MDNF_OK when admissible */
  double f00, fx0, fy0, fxx0, omega0;
  int flip_f, flip_y;
} mdnf_check_report;

typedef struct mdnf_check_result {
  double max_err;
  double tol;
  int pass;
} mdnf_check_result;

typedef struct mdnf_verify_result {
  mdnf_check_result symplectic, functional, boundary, area, lemma5, bisector;
  double boundary_probe_min_q;
  double grid_extent, chart_radius, eps_max;
  int overall_pass;
} mdnf_verify_result;

MDNF_API const char* mdnf_status_name(mdnf_status status);
MDNF_API const char* mdnf_last_error(void);
MDNF_API void mdnf_string_free(char* s);

MDNF_API mdnf_status mdnf_session_create(const char* config_text, mdnf_session** out);
MDNF_API mdnf_status mdnf_session_create_from_file(const char* path, mdnf_session** out);
MDNF_API void mdnf_session_destroy(mdnf_session* session);

MDNF_API mdnf_status mdnf_session_set_output_dir(mdnf_session* session, const char* dir);
/* Borrowed; valid until the session is modified or destroyed. */
MDNF_API const char* mdnf_session_output_dir(const mdnf_session* session);
/* Bitmask of mdnf_format values requested by the config. */
MDNF_API int mdnf_session_formats(const mdnf_session* session);

MDNF_API mdnf_status mdnf_check(mdnf_session* session, mdnf_check_report* out);
MDNF_API mdnf_status mdnf_check_json(mdnf_session* session, char** out);

/* summary may be NULL. */
MDNF_API mdnf_status mdnf_profile(mdnf_session* session, mdnf_format format, char** table,
                                  char** summary);
MDNF_API mdnf_status mdnf_chart_table(mdnf_session* session, mdnf_format format, char** table);
MDNF_API mdnf_status mdnf_levels(mdnf_session* session, mdnf_format format, char** table);

/* Failed checks are reported in *out, not through the status.  json may be
 * NULL. */
MDNF_API mdnf_status mdnf_verify(mdnf_session* session, mdnf_verify_result* out, char** json);

/* Chart value at an input-coordinate point. */
MDNF_API mdnf_status mdnf_chart_eval(mdnf_session* session, double x, double y, double* p,
                                     double* q);

MDNF_API mdnf_status mdnf_expr_eval(const char* expr, double x, double y, double* out);
/* out = {v, dx, dy, dxx, dxy, dyy} */
MDNF_API mdnf_status mdnf_expr_jet2(const char* expr, double x, double y, double out[6]);

#ifdef __cplusplus
}
#endif

#endif
