/* vapp - block-decomposition augmented Lagrangian solver
 * Copyright 2026 vapp contributors
 * Licensed under the Apache License, Version 2.0
 *
 * C interface of the solver shared library. All entry points are
 * exception-free; failures come back as a status code, with a human-readable
 * message available from vapp_last_error() on the same thread.
 */

#ifndef VAPP_VAPP_H_
#define VAPP_VAPP_H_

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vapp_status {
  VAPP_OK = 0,
  VAPP_ERR_INVALID_ARGUMENT = 1,
  VAPP_ERR_DIMENSION = 2,
  VAPP_ERR_UNSUPPORTED = 3,
  VAPP_ERR_SINGULAR = 4,
  VAPP_ERR_VALIDATION = 5,
  VAPP_ERR_PARSE = 6,
  VAPP_ERR_IO = 7,
  VAPP_ERR_NUMERICAL = 8,
  VAPP_ERR_NO_CONVERGENCE = 9,
  VAPP_ERR_SIZE_LIMIT = 10,
  VAPP_ERR_UNAVAILABLE = 11,
  VAPP_ERR_INTERNAL = 12
} vapp_status;

/* Library version as "major.minor.patch". Static storage, do not free. */
const char* vapp_version(void);

/* Stable name of a status code, e.g. "validation". Static storage. */
const char* vapp_status_name(vapp_status status);

/* Message of the most recent failure on this thread ("" if none). The
 * pointer stays valid until the next failing call on the same thread. */
const char* vapp_last_error(void);

/* ------------------------------------------------------------------ */
/* Configuration                                                       */
/* ------------------------------------------------------------------ */

typedef struct vapp_config vapp_config;

/* Empty configuration; populate with _load_* and _set. NULL on allocation
 * failure. */
vapp_config* vapp_config_new(void);
void vapp_config_free(vapp_config* config);

/* Replaces the configuration with the parsed file / text ("key = value"
 * lines, '#' comments; the 'problem' key is required). */
vapp_status vapp_config_load_file(vapp_config* config, const char* path);
vapp_status vapp_config_load_text(vapp_config* config, const char* text);

/* Sets or overrides a single key. */
vapp_status vapp_config_set(vapp_config* config, const char* key,
                            const char* value);

/* Current value of a known key as text (defaults included). Free with
 * vapp_string_free. */
vapp_status vapp_config_get(const vapp_config* config, const char* key,
                            char** out_value);

/* ------------------------------------------------------------------ */
/* Jobs                                                                */
/* ------------------------------------------------------------------ */

typedef struct vapp_job vapp_job;

/* Builds the problem, core, and parameters described by the configuration.
 * The configuration can be freed afterwards. */
vapp_status vapp_job_new(const vapp_config* config, vapp_job** out_job);
void vapp_job_free(vapp_job* job);

/* Sizes of the assembled problem. Any output pointer may be NULL. */
vapp_status vapp_job_dims(const vapp_job* job, int* out_n, int* out_m,
                          int* out_blocks);

/* Parameter validation report as JSON (no solve). Free with
 * vapp_string_free. */
vapp_status vapp_job_validate(const vapp_job* job, char** out_json);

/* Runs the solver. VAPP_OK when the tolerances were reached,
 * VAPP_ERR_NO_CONVERGENCE at the iteration cap (results remain available),
 * VAPP_ERR_VALIDATION when the parameters are rejected. */
vapp_status vapp_job_run(vapp_job* job);

/* Iterations of the finished run; -1 before a successful run. */
long vapp_job_iterations(const vapp_job* job);

/* Copies the final iterate into caller-owned buffers. Either pair may be
 * (NULL, 0) to skip; lengths must match the problem dimensions exactly. */
vapp_status vapp_job_solution(const vapp_job* job, double* out_u, size_t u_len,
                              double* out_p, size_t p_len);

/* Run summary JSON / iteration trace CSV of the finished run. Free with
 * vapp_string_free. */
vapp_status vapp_job_summary(const vapp_job* job, char** out_json);
vapp_status vapp_job_trace_csv(const vapp_job* job, char** out_csv);

/* Writes the trace CSV and summary JSON to the paths named by the
 * configuration; keys left empty are skipped. */
vapp_status vapp_job_write_outputs(const vapp_job* job);

/* Frees any string returned by this library. */
void vapp_string_free(char* text);

/* ------------------------------------------------------------------ */
/* Utilities                                                           */
/* ------------------------------------------------------------------ */

/* Writes a synthetic instance to `path`. Kinds "fused-svm", "logistic",
 * "dsvm", and "classification" write a labeled dataset in sparse text form
 * (n = features, m = samples); kind "qp" writes a block QP instance file
 * (n = variables, m = constraints, split into `blocks` blocks). */
vapp_status vapp_generate_dataset(const char* kind, unsigned long long seed,
                                  int n, int m, double sparsity, int blocks,
                                  const char* path);

/* Runs the built-in benchmark suite; report as JSON. Free with
 * vapp_string_free. */
vapp_status vapp_bench_json(char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* VAPP_VAPP_H_ */
