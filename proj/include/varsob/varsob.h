#ifndef VARSOB_VARSOB_H
#define VARSOB_VARSOB_H

/* C interface to the varsob library. Strings returned through char** are owned by the caller and released with
 * varsob_string_free. On failure the functions return a nonzero status and varsob_last_error() describes it; the
 * message is per thread and stays valid until the next failing call on that thread. */

#include <stddef.h>

#if defined(_WIN32)
#define VARSOB_API __declspec(dllexport)
#elif defined(VARSOB_BUILDING)
#define VARSOB_API __attribute__((visibility("default")))
#else
#define VARSOB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum varsob_status {
  VARSOB_OK = 0,
  VARSOB_INVALID_ARGUMENT = 1,
  VARSOB_DOMAIN = 2,
  VARSOB_PARSE = 3,
  VARSOB_IO = 4,
  VARSOB_INTERNAL = 5
} varsob_status;

typedef struct varsob_space varsob_space;

VARSOB_API const char* varsob_version(void);
VARSOB_API const char* varsob_last_error(void);
VARSOB_API void varsob_string_free(char* s);

/* Spaces. */
VARSOB_API varsob_status varsob_space_from_json(const char* json, varsob_space** out);
/* params: {"kind": "grid1d" | "grid2d" | "ball_grid_with_atom" | "cantor" | "two_zone_glued", ...}. */
VARSOB_API varsob_status varsob_space_generate(const char* params_json, varsob_space** out);
VARSOB_API varsob_status varsob_space_to_json(const varsob_space* space, char** out_json);
VARSOB_API size_t varsob_space_size(const varsob_space* space);
VARSOB_API void varsob_space_free(varsob_space* space);

/* Luxemburg norm of u with exponent p; both arrays have varsob_space_size entries. */
VARSOB_API varsob_status varsob_luxemburg(const varsob_space* space, const double* u, const double* p, double tol,
                                          double* out_norm);
/* Minimal scalar s-gradient of u in L^p. g_out (optional) receives the gradient. */
VARSOB_API varsob_status varsob_minimal_gradient(const varsob_space* space, const double* u, const double* s,
                                                 const double* p, double* g_out, double* out_objective);

/* Runs "norm", "gradient", "verify" or "necessity" on a scenario (or {"scenarios": [...]}). options_json may be
 * NULL or an object with tol, sigma, epsilon, seed, jobs and base_dir. all_pass is 1 when every applicable check
 * passed. */
VARSOB_API varsob_status varsob_run(const char* command, const char* scenario_json, const char* options_json,
                                    char** out_json, int* all_pass);
/* CSV summary of a JSON report array. */
VARSOB_API varsob_status varsob_reports_to_csv(const char* reports_json, char** out_csv);

#ifdef __cplusplus
}
#endif

#endif
