/* C interface to the evoc simulator. Generated by cbindgen; do not edit. */

#ifndef EVOC_H
#define EVOC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of a C API call.
 */
typedef enum EvocStatus {
  EVOC_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  EVOC_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  EVOC_STATUS_INVALID_UTF8 = 2,
  /**
   * Parameters could not be parsed or failed validation.
   */
  EVOC_STATUS_INVALID_CONFIG = 3,
  /**
   * An index argument was out of range.
   */
  EVOC_STATUS_INDEX_OUT_OF_RANGE = 4,
  /**
   * The provided buffer is too small.
   */
  EVOC_STATUS_BUFFER_TOO_SMALL = 5,
  /**
   * An internal panic was caught at the boundary.
   */
  EVOC_STATUS_PANIC = 6,
} EvocStatus;

/**
 * Head-term variant of the scoring rule.
 */
typedef enum EvocHeadRule {
  /**
   * Reward a stationary head (default).
   */
  EVOC_HEAD_RULE_PROSE = 0,
  /**
   * Reward a moving head.
   */
  EVOC_HEAD_RULE_LITERAL = 1,
} EvocHeadRule;

/**
 * Opaque simulation parameter set.
 */
typedef struct EvocParams EvocParams;

/**
 * Opaque result of one run: the per-iteration records and the final
 * per-agent invention probabilities.
 */
typedef struct EvocSeries EvocSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or null. The pointer
 * is valid until the next failing call on the same thread.
 */
const char *evoc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *evoc_version(void);

/**
 * Frees a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must have been returned by a function of this library and not freed
 * before.
 */
void evoc_string_free(char *s);

/**
 * New parameter handle with the default parameter set.
 */
struct EvocParams *evoc_params_new(void);

/**
 * Parses a parameter handle from a JSON object. Absent fields keep their
 * defaults; unknown fields are rejected. On success writes the new handle
 * to `out`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum EvocStatus evoc_params_from_json(const char *json, struct EvocParams **out);

/**
 * Serializes a parameter handle to a JSON string owned by the caller.
 * Returns null on a null handle.
 *
 * # Safety
 * `params` must be a live handle from this library.
 */
char *evoc_params_to_json(const struct EvocParams *params);

/**
 * Frees a parameter handle. Null is a no-op.
 *
 * # Safety
 * `params` must be a live handle from this library, freed at most once.
 */
void evoc_params_free(struct EvocParams *params);

/**
 * Runs one seeded simulation to completion. On success writes a series
 * handle to `out`. The run is a pure function of the parameters.
 *
 * # Safety
 * `params` must be a live handle; `out` must be a valid pointer.
 */
enum EvocStatus evoc_run(const struct EvocParams *params, struct EvocSeries **out);

/**
 * Number of per-iteration records in the series (iterations + 1; record 0
 * is the initial state). Zero on a null handle.
 *
 * # Safety
 * `series` must be a live handle or null.
 */
uintptr_t evoc_series_record_count(const struct EvocSeries *series);

/**
 * Number of agents in the simulated society. Zero on a null handle.
 *
 * # Safety
 * `series` must be a live handle or null.
 */
uintptr_t evoc_series_agent_count(const struct EvocSeries *series);

/**
 * Mean fitness at a record index.
 *
 * # Safety
 * `series` must be a live handle; `out` must be a valid pointer.
 */
enum EvocStatus evoc_series_mean_fitness(const struct EvocSeries *series,
                                         uintptr_t index,
                                         double *out);

/**
 * Number of distinct implemented chains at a record index.
 *
 * # Safety
 * `series` must be a live handle; `out` must be a valid pointer.
 */
enum EvocStatus evoc_series_diversity(const struct EvocSeries *series,
                                      uintptr_t index,
                                      double *out);

/**
 * Mean invention probability at a record index.
 *
 * # Safety
 * `series` must be a live handle; `out` must be a valid pointer.
 */
enum EvocStatus evoc_series_mean_p_create(const struct EvocSeries *series,
                                          uintptr_t index,
                                          double *out);

/**
 * Share of agents with p(C) <= 0.1 at a record index.
 *
 * # Safety
 * `series` must be a live handle; `out` must be a valid pointer.
 */
enum EvocStatus evoc_series_frac_imitators(const struct EvocSeries *series,
                                           uintptr_t index,
                                           double *out);

/**
 * Share of agents with p(C) >= 0.9 at a record index.
 *
 * # Safety
 * `series` must be a live handle; `out` must be a valid pointer.
 */
enum EvocStatus evoc_series_frac_creators(const struct EvocSeries *series,
                                          uintptr_t index,
                                          double *out);

/**
 * Copies the final per-agent invention probabilities into `buffer`
 * (capacity `len`); fails with `BufferTooSmall` if it cannot hold them all.
 *
 * # Safety
 * `series` must be a live handle; `buffer` must point to at least `len`
 * writable doubles.
 */
enum EvocStatus evoc_series_final_p_create(const struct EvocSeries *series,
                                           double *buffer,
                                           uintptr_t len);

/**
 * Serializes the whole series (parameters, records, final probabilities) to
 * a JSON string owned by the caller. Returns null on a null handle.
 *
 * # Safety
 * `series` must be a live handle from this library.
 */
char *evoc_series_to_json(const struct EvocSeries *series);

/**
 * Frees a series handle. Null is a no-op.
 *
 * # Safety
 * `series` must be a live handle from this library, freed at most once.
 */
void evoc_series_free(struct EvocSeries *series);

/**
 * Exhaustively scans the 729-action space under the given head rule and
 * writes the maximum single-action fitness and the number of maximizers.
 *
 * # Safety
 * `out_max` and `out_count` must be valid pointers.
 */
enum EvocStatus evoc_oracle(enum EvocHeadRule head_rule, double *out_max, uintptr_t *out_count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EVOC_H */
