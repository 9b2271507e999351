#ifndef RLMH_C_API_H
#define RLMH_C_API_H

/* C interface to the rlmh sampling library: opaque handles, integer status
 * codes, no C++ types across the boundary. Thread-safe as long as each
 * handle is used by one thread at a time. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RLMH_API __declspec(dllexport)
#else
#define RLMH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rlmh_status {
  RLMH_OK = 0,
  RLMH_ERR_CONFIG = 1,       /* bad document, unknown key, invalid value */
  RLMH_ERR_RUNTIME = 2,      /* any other failure */
  RLMH_ERR_CATASTROPHIC = 3  /* a replicate hit the failure detector */
} rlmh_status;

typedef struct rlmh_config rlmh_config;
typedef struct rlmh_result rlmh_result;

/* Message for the most recent failure on this thread; never NULL. */
RLMH_API const char* rlmh_last_error(void);

RLMH_API rlmh_config* rlmh_config_default(void);
RLMH_API rlmh_config* rlmh_config_from_file(const char* path);
RLMH_API rlmh_config* rlmh_config_from_json(const char* json_text);
RLMH_API void rlmh_config_free(rlmh_config* cfg);

/* "key=value", applied to the serialized form and re-validated. */
RLMH_API rlmh_status rlmh_config_override(rlmh_config* cfg, const char* key_value);
RLMH_API rlmh_status rlmh_config_set_seed(rlmh_config* cfg, uint64_t seed);
RLMH_API rlmh_status rlmh_config_set_out_dir(rlmh_config* cfg, const char* dir);
RLMH_API rlmh_status rlmh_config_set_replicates(rlmh_config* cfg, int replicates);

/* Canonical serialized form; free with rlmh_string_free. NULL on failure. */
RLMH_API char* rlmh_config_to_json(const rlmh_config* cfg);
RLMH_API void rlmh_string_free(char* s);

/* Runs all replicates, writes artifacts, fills *out_result (also when the
 * status is RLMH_ERR_CATASTROPHIC; NULL on config/runtime failure). */
RLMH_API rlmh_status rlmh_run(const rlmh_config* cfg, rlmh_result** out_result);
RLMH_API void rlmh_result_free(rlmh_result* result);

RLMH_API int rlmh_result_replicates(const rlmh_result* r);
RLMH_API const char* rlmh_result_out_dir(const rlmh_result* r);
/* Per-replicate accessors; replicate out of range gives -1 / NaN / NULL. */
RLMH_API int rlmh_result_catastrophic(const rlmh_result* r, int replicate);
RLMH_API const char* rlmh_result_failure_reason(const rlmh_result* r, int replicate);
RLMH_API double rlmh_result_mmd(const rlmh_result* r, int replicate);
RLMH_API double rlmh_result_aar(const rlmh_result* r, int replicate);
RLMH_API double rlmh_result_mean_esjd(const rlmh_result* r, int replicate);
RLMH_API double rlmh_result_eps_final(const rlmh_result* r, int replicate);
RLMH_API int64_t rlmh_result_logp_evals(const rlmh_result* r, int replicate);
RLMH_API int64_t rlmh_result_grad_evals(const rlmh_result* r, int replicate);

/* Constant-step-size sweep; table lands under the config's output directory.
 * Catastrophic cells are marked in the table, not reflected in the status. */
RLMH_API rlmh_status rlmh_sweep(const rlmh_config* cfg, const double* grid,
                                size_t n_grid);

/* Evaluates a saved 2D actor checkpoint on a regular (resolution+1)^2 grid. */
RLMH_API rlmh_status rlmh_export_policy(const char* actor_checkpoint, double x1_min,
                                        double x1_max, double x2_min, double x2_max,
                                        int resolution, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* RLMH_C_API_H */
