/* Public C API for the robust treatment-planning library.
 *
 * All functions return rtplan_status; RTPLAN_OK means success and any other
 * value leaves a human-readable message in rtplan_last_error() (thread
 * local). Objects are created behind opaque handles and released with the
 * matching _free function; _free accepts NULL.
 */
#ifndef RTPLAN_H
#define RTPLAN_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rtplan_status {
  RTPLAN_OK = 0,
  /* Bad call: NULL handle, bad enum string, out-of-range buffer size. */
  RTPLAN_ERROR_INVALID_ARGUMENT = 1,
  /* Malformed configuration or data file (syntax). */
  RTPLAN_ERROR_PARSE = 2,
  /* Well-formed configuration violating the schema or an invariant. */
  RTPLAN_ERROR_SCHEMA = 3,
  /* Domain-rule violation (dimensions, normalization, feasibility). */
  RTPLAN_ERROR_DOMAIN = 4,
  /* Failure while running (non-finite objective, sampling exhausted). */
  RTPLAN_ERROR_RUNTIME = 5,
  /* Filesystem failure. */
  RTPLAN_ERROR_IO = 6
} rtplan_status;

typedef struct rtplan_config rtplan_config;
typedef struct rtplan_result rtplan_result;

/* Library version string, e.g. "1.0.0". */
const char* rtplan_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* rtplan_last_error(void);

/* --- Configuration ----------------------------------------------------- */

/* Built-in defaults (64x64 phantom, 5 beams, 5 motion states, cso). */
rtplan_status rtplan_config_default(rtplan_config** out);

/* Parse a configuration document (JSON, // and block comments allowed). */
rtplan_status rtplan_config_from_text(const char* text, rtplan_config** out);
rtplan_status rtplan_config_from_file(const char* path, rtplan_config** out);

void rtplan_config_free(rtplan_config* config);

/* Overrides applied after parsing; algorithm is "cso", "fpa", or "bso". */
rtplan_status rtplan_config_set_seed(rtplan_config* config, uint64_t seed);
rtplan_status rtplan_config_set_algorithm(rtplan_config* config,
                                          const char* algorithm);

/* Total beamlet count implied by the beams section. */
rtplan_status rtplan_config_beamlet_count(const rtplan_config* config,
                                          int32_t* out);

/* --- Runs --------------------------------------------------------------- */

/* Writes phantom.csv (voxel labels) into out_dir. */
rtplan_status rtplan_run_phantom(const rtplan_config* config,
                                 const char* out_dir);

/* Runs the configured optimizer on the robust objective. When out_dir is
 * non-NULL, writes plan.csv, convergence.csv, dvh_<scenario>.csv, and
 * report.txt there. When out_result is non-NULL, returns a result handle
 * the caller must free. */
rtplan_status rtplan_run_optimize(const rtplan_config* config,
                                  const char* out_dir,
                                  rtplan_result** out_result);

/* Runs cso, fpa, and bso with matched seed and budget; writes
 * comparison.csv into out_dir. */
rtplan_status rtplan_run_compare(const rtplan_config* config,
                                 const char* out_dir);

/* Evaluates a stored plan (plan.csv format) under the nominal pdf and
 * writes dvh_nominal.csv into out_dir. */
rtplan_status rtplan_run_dvh(const rtplan_config* config,
                             const char* weights_csv_path,
                             const char* out_dir);

/* --- Results ------------------------------------------------------------ */

void rtplan_result_free(rtplan_result* result);

rtplan_status rtplan_result_algorithm(const rtplan_result* result,
                                      const char** out);
rtplan_status rtplan_result_seed(const rtplan_result* result, uint64_t* out);
rtplan_status rtplan_result_best_fitness(const rtplan_result* result,
                                         double* out);
rtplan_status rtplan_result_evaluations(const rtplan_result* result,
                                        uint64_t* out);
rtplan_status rtplan_result_wall_seconds(const rtplan_result* result,
                                         double* out);

/* Best plan weights. Call with buffer = NULL to query the count. */
rtplan_status rtplan_result_weight_count(const rtplan_result* result,
                                         int32_t* out);
rtplan_status rtplan_result_weights(const rtplan_result* result,
                                    double* buffer, int32_t capacity);

/* Best-value-per-iteration history (entry 0 is the initial population). */
rtplan_status rtplan_result_history_length(const rtplan_result* result,
                                           int32_t* out);
rtplan_status rtplan_result_history(const rtplan_result* result,
                                    double* buffer, int32_t capacity);

/* Scenario blocks: "nominal" always, "underdose"/"overdose" when distinct.
 * Structure is "tumor", "left_lung", "heart", or "normal"; stat is
 * "mean_gy", "min_gy", "max_gy", or "d95_gy". Returned name pointers stay
 * valid until the result is freed. */
rtplan_status rtplan_result_scenario_count(const rtplan_result* result,
                                           int32_t* out);
rtplan_status rtplan_result_scenario_name(const rtplan_result* result,
                                          int32_t index, const char** out);
rtplan_status rtplan_result_stat(const rtplan_result* result,
                                 const char* scenario, const char* structure,
                                 const char* stat, double* out);

#ifdef __cplusplus
}
#endif

#endif /* RTPLAN_H */
