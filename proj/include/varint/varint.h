#ifndef VARINT_VARINT_H
#define VARINT_VARINT_H

/* C interface of the varint library. Every call returns a status code; the
 * message of the most recent failure on the calling thread is available from
 * varint_last_error(). Strings returned by accessors stay valid until the
 * owning handle is destroyed. */

#include <stddef.h>

#if defined(VARINT_BUILDING)
#define VARINT_API __attribute__((visibility("default")))
#else
#define VARINT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  VARINT_OK = 0,
  VARINT_ERR_CONFIG = 1,
  VARINT_ERR_DOMAIN = 2,
  VARINT_ERR_NONMONOTONE_TIME = 3,
  VARINT_ERR_NONCONVERGENCE = 4,
  VARINT_ERR_ILL_POSED = 5,
  VARINT_ERR_UNSUPPORTED_ORDER = 6,
  VARINT_ERR_IO = 7,
  VARINT_ERR_INVALID_ARGUMENT = 8,
  VARINT_ERR_INTERNAL = 9
} varint_status;

typedef struct varint_config varint_config;
typedef struct varint_result varint_result;
typedef struct varint_suite_result varint_suite_result;
typedef struct varint_bea_result varint_bea_result;

VARINT_API const char* varint_last_error(void);
VARINT_API const char* varint_status_string(varint_status status);

/* Configuration: flat key=value settings with defaults for every key. */
VARINT_API varint_status varint_config_create(varint_config** out);
VARINT_API varint_status varint_config_load_file(const char* path, varint_config** out);
VARINT_API void varint_config_destroy(varint_config* cfg);
VARINT_API varint_status varint_config_set(varint_config* cfg, const char* key, const char* value);
/* Applies "key=value". */
VARINT_API varint_status varint_config_assign(varint_config* cfg, const char* assignment);
/* Copies the value into buf (NUL-terminated, truncated to cap). *needed gets
 * the full length plus one when non-NULL. */
VARINT_API varint_status varint_config_get(const varint_config* cfg, const char* key, char* buf, size_t cap,
                                           size_t* needed);
VARINT_API varint_status varint_config_validate(const varint_config* cfg);
VARINT_API size_t varint_config_key_count(void);
VARINT_API const char* varint_config_key_name(size_t i);

/* Single run. Returns a config or I/O status when the run could not start;
 * numerical failures still produce a result whose varint_result_error() is
 * set and whose states hold the partial trajectory. */
VARINT_API varint_status varint_run(const varint_config* cfg, varint_result** out);
VARINT_API void varint_result_destroy(varint_result* r);
VARINT_API int varint_result_complete(const varint_result* r);
VARINT_API int varint_result_met_tolerance(const varint_result* r);
VARINT_API varint_status varint_result_error(const varint_result* r);
VARINT_API const char* varint_result_diagnosis(const varint_result* r);
VARINT_API size_t varint_result_num_states(const varint_result* r);
VARINT_API int varint_result_dim(const varint_result* r);
/* q and p must hold varint_result_dim() values; any output may be NULL. */
VARINT_API varint_status varint_result_state(const varint_result* r, size_t k, double* t, double* q, double* p,
                                             double* E);
VARINT_API size_t varint_result_summary_count(const varint_result* r);
VARINT_API const char* varint_result_summary_key(const varint_result* r, size_t i);
VARINT_API const char* varint_result_summary_value(const varint_result* r, size_t i);
/* *value is NULL when the key is absent. */
VARINT_API varint_status varint_result_summary_get(const varint_result* r, const char* key, const char** value);

/* Suites. Member failures are recorded, the suite continues. */
VARINT_API varint_status varint_suite_run(const char* name, const char* output_root, int workers,
                                          const char* const* overrides, size_t num_overrides,
                                          varint_suite_result** out);
VARINT_API void varint_suite_destroy(varint_suite_result* s);
VARINT_API size_t varint_suite_count(const varint_suite_result* s);
VARINT_API int varint_suite_failed(const varint_suite_result* s);
VARINT_API const char* varint_suite_member_name(const varint_suite_result* s, size_t i);
/* 1 when the member completed and met its solver tolerance. */
VARINT_API int varint_suite_member_ok(const varint_suite_result* s, size_t i);
VARINT_API const char* varint_suite_member_failure(const varint_suite_result* s, size_t i);

/* Registries. */
VARINT_API size_t varint_problem_count(void);
VARINT_API const char* varint_problem_name(size_t i);
VARINT_API size_t varint_integrator_count(void);
VARINT_API const char* varint_integrator_name(size_t i);
VARINT_API size_t varint_suite_name_count(void);
VARINT_API const char* varint_suite_name(size_t i);

/* Residual order study (oscillator or pendulum). */
VARINT_API varint_status varint_bea_run(const varint_config* cfg, varint_bea_result** out);
VARINT_API void varint_bea_destroy(varint_bea_result* r);
VARINT_API size_t varint_bea_count(const varint_bea_result* r);
VARINT_API varint_status varint_bea_point(const varint_bea_result* r, size_t i, double* delta_a, double* residual_off,
                                          double* residual_on);
VARINT_API varint_status varint_bea_slopes(const varint_bea_result* r, double* slope_off, double* slope_on,
                                           double* slope_E_off, double* slope_E_on, double* psi_ratio_off);

/* Kepler helpers in double precision. */
VARINT_API varint_status varint_kepler_initial_state(double e, double q[2], double p[2], double* H);
VARINT_API varint_status varint_kepler_hamiltonian(const double q[2], const double p[2], double* H);

#ifdef __cplusplus
}
#endif

#endif
