#ifndef PLAN_FFI_H
#define PLAN_FFI_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum PlanStatus {
  PLAN_STATUS_OK = 0,
  PLAN_STATUS_NULL_POINTER = 1,
  PLAN_STATUS_INVALID_ARGUMENT = 2,
  PLAN_STATUS_PARSE_ERROR = 3,
  PLAN_STATUS_INVALID_SCENARIO = 4,
  PLAN_STATUS_UNKNOWN_NAME = 5,
  PLAN_STATUS_DIMENSION_MISMATCH = 6,
  PLAN_STATUS_IO_ERROR = 7,
  PLAN_STATUS_BUFFER_TOO_SMALL = 8,
  PLAN_STATUS_RUNTIME_ERROR = 9,
  PLAN_STATUS_PANIC = 10,
} PlanStatus;

/**
 * How a run stops: `value` is seconds for the time kinds and an
 * iteration count for `Iterations`.
 */
typedef enum PlanTerminationKind {
  PLAN_TERMINATION_KIND_SECONDS = 0,
  PLAN_TERMINATION_KIND_ITERATIONS = 1,
  PLAN_TERMINATION_KIND_FIRST_SOLUTION_THEN_SECONDS = 2,
} PlanTerminationKind;

/**
 * Opaque planner result handle.
 */
typedef struct PlanResult PlanResult;

/**
 * Opaque scenario handle.
 */
typedef struct PlanScenario PlanScenario;

/**
 * Planner parameters. Fill with [`plan_config_default`] or
 * [`plan_config_preset`] and adjust.
 */
typedef struct PlanConfigC {
  double range;
  /**
   * Non-positive means derive the rewiring constant from the bounds.
   */
  double gamma;
  double opt_threshold;
  double scf;
  bool informed_sampling;
  bool sample_rejection;
  uint64_t seed;
} PlanConfigC;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *plan_last_error_message(void);

/**
 * Parses a scenario from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum PlanStatus plan_scenario_from_json(const char *json, struct PlanScenario **out);

/**
 * Loads a scenario from a JSON file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum PlanStatus plan_scenario_load_file(const char *path, struct PlanScenario **out);

/**
 * Frees a scenario. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void plan_scenario_free(struct PlanScenario *s);

/**
 * Configuration-space dimension, or 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live scenario handle.
 */
size_t plan_scenario_dimension(const struct PlanScenario *s);

/**
 * Writes whether configuration `q` (dimension doubles) is collision free.
 *
 * # Safety
 * `q` must point to `dimension` doubles and `out` be writable.
 */
enum PlanStatus plan_scenario_is_valid(const struct PlanScenario *s, const double *q, bool *out);

/**
 * Writes whether the straight motion from `a` to `b` is collision free.
 *
 * # Safety
 * `a` and `b` must each point to `dimension` doubles and `out` be writable.
 */
enum PlanStatus plan_scenario_motion_valid(const struct PlanScenario *s,
                                           const double *a,
                                           const double *b,
                                           bool *out);

/**
 * Library defaults.
 */
struct PlanConfigC plan_config_default(void);

/**
 * Parameters of a named preset (`vine`, `cubicle`) for a planner.
 *
 * # Safety
 * `preset` and `planner` must be NUL-terminated strings, `out` writable.
 */
enum PlanStatus plan_config_preset(const char *preset,
                                   const char *planner,
                                   struct PlanConfigC *out);

/**
 * Runs a planner. `planner` takes the names `rrt-connect`,
 * `rrt-connect-s`, `m-rrt-connect-s`, `rrt-connect-star`,
 * `rrt-connect-star-s` (or their display names). A run that finds no
 * path still succeeds; check [`plan_result_has_path`].
 *
 * # Safety
 * `scenario` and `config` must be live, `planner` NUL-terminated and
 * `out` writable.
 */
enum PlanStatus plan_run(const struct PlanScenario *scenario,
                         const char *planner,
                         const struct PlanConfigC *config,
                         enum PlanTerminationKind termination,
                         double value,
                         struct PlanResult **out);

/**
 * Frees a result. Null is ignored.
 *
 * # Safety
 * `r` must come from [`plan_run`] and not be freed twice.
 */
void plan_result_free(struct PlanResult *r);

/**
 * # Safety
 * `r` must be null or a live result handle.
 */
bool plan_result_has_path(const struct PlanResult *r);

/**
 * Path length, or infinity when there is no path or the handle is null.
 *
 * # Safety
 * `r` must be null or a live result handle.
 */
double plan_result_length(const struct PlanResult *r);

/**
 * Number of configurations in the path, 0 without one.
 *
 * # Safety
 * `r` must be null or a live result handle.
 */
size_t plan_result_vertex_count(const struct PlanResult *r);

/**
 * Copies the path into `buf` as `vertex_count * dimension` doubles.
 * `capacity` counts doubles; a short buffer gives `BufferTooSmall`.
 *
 * # Safety
 * `buf` must have room for `capacity` doubles.
 */
enum PlanStatus plan_result_copy_path(const struct PlanResult *r, double *buf, size_t capacity);

/**
 * # Safety
 * `r` must be null or a live result handle.
 */
uint64_t plan_result_local_opt_count(const struct PlanResult *r);

/**
 * Seconds to the first solution, or a negative value if none was found.
 *
 * # Safety
 * `r` must be null or a live result handle.
 */
double plan_result_first_solution_time(const struct PlanResult *r);

/**
 * # Safety
 * `r` must be null or a live result handle.
 */
uint64_t plan_result_iterations(const struct PlanResult *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLAN_FFI_H */
