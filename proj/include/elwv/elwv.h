/* C interface to the elwv shock-formation toolkit. */
#ifndef ELWV_ELWV_H
#define ELWV_ELWV_H

#include <stddef.h>

#if defined(ELWV_BUILDING_LIBRARY)
#define ELWV_API __attribute__((visibility("default")))
#else
#define ELWV_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Return codes. Every function returning int uses these. */
enum {
  ELWV_OK = 0,
  ELWV_ERR_INVALID_ARGUMENT = 1,
  ELWV_ERR_OUTSIDE_BALL = 2,
  ELWV_ERR_DEGENERATE = 3,
  ELWV_ERR_CFL = 4,
  ELWV_ERR_NO_SHOCK = 5,
  ELWV_ERR_IO = 6,
  ELWV_ERR_CONFIG = 7,
  ELWV_ERR_NOT_CONVERGED = 8,
  ELWV_ERR_OUT_OF_RANGE = 9,
  ELWV_ERR_INTERNAL = 99
};

typedef struct elwv_config elwv_config;
typedef struct elwv_report elwv_report;

typedef struct elwv_phys {
  double c1, c2, sigma0, sigma1, kappa;
} elwv_phys;

ELWV_API const char* elwv_version(void);
ELWV_API const char* elwv_error_name(int code);
/* Message of the last failing call on this thread; never NULL. */
ELWV_API const char* elwv_last_error(void);
/* Releases strings returned through char** out-parameters. */
ELWV_API void elwv_string_free(char* s);

ELWV_API size_t elwv_preset_count(void);
ELWV_API const char* elwv_preset_name(size_t i);

ELWV_API int elwv_config_new(const char* preset, elwv_config** out);
/* On ELWV_ERR_CONFIG, elwv_last_error lists every violation, one per line. */
ELWV_API int elwv_config_parse(const char* text, elwv_config** out);
ELWV_API int elwv_config_set(elwv_config* cfg, const char* key, const char* value);
ELWV_API int elwv_config_get(const elwv_config* cfg, const char* key, char** value);
ELWV_API int elwv_config_dump(const elwv_config* cfg, char** text);
ELWV_API int elwv_config_validate(const elwv_config* cfg);
ELWV_API void elwv_config_free(elwv_config* cfg);

ELWV_API size_t elwv_suite_count(void);
ELWV_API const char* elwv_suite_name(size_t i);

typedef void (*elwv_log_fn)(const char* message, void* user);
ELWV_API int elwv_run_suite(const elwv_config* cfg, const char* suite, elwv_log_fn log, void* user,
                            elwv_report** out);
ELWV_API int elwv_report_json(const elwv_report* r, char** json);
ELWV_API int elwv_report_counts(const elwv_report* r, size_t* pass, size_t* fail, size_t* skip);
ELWV_API size_t elwv_report_check_count(const elwv_report* r);
/* verdict: 0 pass, 1 fail, 2 skip. Strings stay valid until elwv_report_free. */
ELWV_API int elwv_report_check(const elwv_report* r, size_t i, const char** name, int* verdict, const char** reason);
ELWV_API void elwv_report_free(elwv_report* r);

/* Pointwise model queries. */
ELWV_API elwv_phys elwv_phys_default(void);
ELWV_API int elwv_eigenvalues(const elwv_phys* p, const double phi[4], double lambda[4]);
ELWV_API int elwv_c111_at_rest(const elwv_phys* p, double* value);
ELWV_API int elwv_min_gap(const elwv_phys* p, size_t samples, double* sigma);

#ifdef __cplusplus
}
#endif

#endif
