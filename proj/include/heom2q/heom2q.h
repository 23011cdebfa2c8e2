#ifndef HEOM2Q_H
#define HEOM2Q_H

/* C interface to the two-qubit HEOM simulator.
 *
 * Every handle is opaque and owned by the caller; release it with the
 * matching *_free function (NULL is accepted). Functions return a
 * heom2q_status; on failure heom2q_last_error() describes the problem
 * for the calling thread until its next API call. Strings returned through
 * char** are heap copies to be released with heom2q_string_free; const char*
 * results borrow from the handle they came from. */

#include <stddef.h>

#if defined(_WIN32)
#define HEOM2Q_API __declspec(dllexport)
#else
#define HEOM2Q_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 0, 2, 3 and 4 double as the command-line exit codes. */
typedef enum heom2q_status {
  HEOM2Q_OK = 0,
  HEOM2Q_INVALID_ARGUMENT = 1,
  HEOM2Q_CONFIG_ERROR = 2,
  HEOM2Q_INTEGRATION_ERROR = 3,
  HEOM2Q_VALIDATION_FAILED = 4,
  HEOM2Q_IO_ERROR = 5,
  HEOM2Q_INTERNAL_ERROR = 6
} heom2q_status;

typedef struct heom2q_config heom2q_config;
typedef struct heom2q_trajectory heom2q_trajectory;
typedef struct heom2q_gp_series heom2q_gp_series;
typedef struct heom2q_sweep_result heom2q_sweep_result;
typedef struct heom2q_report heom2q_report;

HEOM2Q_API const char* heom2q_version(void);
HEOM2Q_API const char* heom2q_last_error(void);
HEOM2Q_API const char* heom2q_status_name(heom2q_status status);
HEOM2Q_API void heom2q_string_free(char* s);

/* Configuration. */
HEOM2Q_API heom2q_status heom2q_config_new(heom2q_config** out);
HEOM2Q_API heom2q_status heom2q_config_parse(const char* text, const char* origin, heom2q_config** out);
HEOM2Q_API heom2q_status heom2q_config_load(const char* path, heom2q_config** out);
HEOM2Q_API heom2q_status heom2q_config_set(heom2q_config* cfg, const char* key, const char* value);
HEOM2Q_API heom2q_status heom2q_config_serialize(const heom2q_config* cfg, char** text);
/* Borrowed; valid until the next heom2q_config_set on cfg. "-" means stdout. */
HEOM2Q_API const char* heom2q_config_output(const heom2q_config* cfg);
/* Key reference as "key = default  # description" lines. */
HEOM2Q_API heom2q_status heom2q_config_reference(char** text);
HEOM2Q_API void heom2q_config_free(heom2q_config* cfg);

/* Trajectory (run). */
typedef struct heom2q_sample {
  double tau;
  double cycle;
  double rho_re[16]; /* row-major, basis |11>, |10>, |01>, |00> */
  double rho_im[16];
  double purity;
  double concurrence;
} heom2q_sample;

HEOM2Q_API heom2q_status heom2q_run(const heom2q_config* cfg, heom2q_trajectory** out);
HEOM2Q_API size_t heom2q_trajectory_size(const heom2q_trajectory* t);
HEOM2Q_API heom2q_status heom2q_trajectory_sample(const heom2q_trajectory* t, size_t i, heom2q_sample* out);
HEOM2Q_API heom2q_status heom2q_trajectory_write_csv(const heom2q_trajectory* t, const char* path);
HEOM2Q_API void heom2q_trajectory_free(heom2q_trajectory* t);

/* Geometric phase. */
HEOM2Q_API heom2q_status heom2q_gp(const heom2q_config* cfg, heom2q_gp_series** out);
HEOM2Q_API size_t heom2q_gp_size(const heom2q_gp_series* g);
HEOM2Q_API heom2q_status heom2q_gp_point(const heom2q_gp_series* g, size_t i, int* cycle, double* phi_wrapped,
                                         double* phi_cumulative);
HEOM2Q_API size_t heom2q_gp_note_count(const heom2q_gp_series* g);
HEOM2Q_API const char* heom2q_gp_note(const heom2q_gp_series* g, size_t i);
HEOM2Q_API heom2q_status heom2q_gp_write_csv(const heom2q_gp_series* g, const char* path);
HEOM2Q_API void heom2q_gp_free(heom2q_gp_series* g);

/* Parameter sweep. The callback may be invoked from worker threads, one call
 * at a time. */
typedef void (*heom2q_progress_fn)(size_t done, size_t total, void* user);

HEOM2Q_API heom2q_status heom2q_sweep(const heom2q_config* cfg, int threads, heom2q_progress_fn progress, void* user,
                                      heom2q_sweep_result** out);
HEOM2Q_API void heom2q_sweep_shape(const heom2q_sweep_result* s, size_t* rows, size_t* cols, size_t* cycles);
HEOM2Q_API int heom2q_sweep_cycle(const heom2q_sweep_result* s, size_t k);
/* ok is 0 for failed cells, whose concurrence and purity are NaN. */
HEOM2Q_API heom2q_status heom2q_sweep_cell(const heom2q_sweep_result* s, size_t i, size_t j, size_t k, double* a, double* b,
                                           double* concurrence, double* purity, int* ok);
HEOM2Q_API size_t heom2q_sweep_failed_cells(const heom2q_sweep_result* s);
/* Writes <prefix>_N<n>.csv for every requested cycle. */
HEOM2Q_API heom2q_status heom2q_sweep_write(const heom2q_sweep_result* s, const char* prefix);
HEOM2Q_API void heom2q_sweep_free(heom2q_sweep_result* s);

/* Validation suite. Returns HEOM2Q_OK when the checks ran, whatever their
 * outcome; query heom2q_report_passed. */
HEOM2Q_API heom2q_status heom2q_validate(const heom2q_config* cfg, heom2q_report** out);
HEOM2Q_API int heom2q_report_passed(const heom2q_report* r);
HEOM2Q_API size_t heom2q_report_size(const heom2q_report* r);
HEOM2Q_API heom2q_status heom2q_report_check(const heom2q_report* r, size_t i, const char** name, int* passed,
                                             double* value, double* bound, const char** detail);
HEOM2Q_API heom2q_status heom2q_report_text(const heom2q_report* r, char** text);
HEOM2Q_API heom2q_status heom2q_report_json(const heom2q_report* r, char** text);
HEOM2Q_API void heom2q_report_free(heom2q_report* r);

#ifdef __cplusplus
}
#endif

#endif
