#ifndef SPECTER_H
#define SPECTER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum SpecterStatus {
  SPECTER_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  SPECTER_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  SPECTER_STATUS_INVALID_UTF8 = 2,
  /**
   * The scenario or model document is malformed or invalid.
   */
  SPECTER_STATUS_INVALID_DOCUMENT = 3,
  /**
   * Composition of a valid scenario failed.
   */
  SPECTER_STATUS_COMPOSITION_FAILED = 4,
  /**
   * An agent, state, task or solver argument was rejected.
   */
  SPECTER_STATUS_INVALID_ARGUMENT = 5,
  /**
   * No goal state is reachable (complete solver).
   */
  SPECTER_STATUS_TASK_INFEASIBLE = 6,
  /**
   * The heuristic solver found no plan.
   */
  SPECTER_STATUS_HEURISTIC_FAILED = 7,
  /**
   * An internal panic was caught.
   */
  SPECTER_STATUS_PANIC = 8,
} SpecterStatus;

/**
 * Solver selector values accepted by [`specter_plan`].
 */
typedef enum SpecterSolver {
  SPECTER_SOLVER_COMPLETE = 0,
  SPECTER_SOLVER_HEURISTIC = 1,
} SpecterSolver;

/**
 * Opaque composed environment model.
 */
typedef struct SpecterModel SpecterModel;

/**
 * Opaque plan document.
 */
typedef struct SpecterPlan SpecterPlan;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *specter_version(void);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next library call on the same thread.
 */
const char *specter_last_error(void);

/**
 * Builds a model from scenario JSON text.
 *
 * # Safety
 * `scenario_json` is a valid NUL-terminated string; `out_model` is valid
 * for a pointer write.
 */
enum SpecterStatus specter_model_build(const char *scenario_json, struct SpecterModel **out_model);

/**
 * Loads a model artifact previously produced by `specter build` or
 * [`specter_model_serialize`].
 *
 * # Safety
 * `model_json` is a valid NUL-terminated string; `out_model` is valid for a
 * pointer write.
 */
enum SpecterStatus specter_model_load(const char *model_json, struct SpecterModel **out_model);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `model` is null or a handle from this library not yet freed.
 */
void specter_model_free(struct SpecterModel *model);

/**
 * Number of composite states in the model.
 *
 * # Safety
 * `model` is a live handle; `out_count` is valid for a write.
 */
enum SpecterStatus specter_model_state_count(const struct SpecterModel *model, size_t *out_count);

/**
 * Number of transitions in the model.
 *
 * # Safety
 * `model` is a live handle; `out_count` is valid for a write.
 */
enum SpecterStatus specter_model_transition_count(const struct SpecterModel *model,
                                                  size_t *out_count);

/**
 * Serializes the model artifact; release the string with
 * [`specter_string_free`].
 *
 * # Safety
 * `model` is a live handle; `out_json` is valid for a pointer write.
 */
enum SpecterStatus specter_model_serialize(const struct SpecterModel *model, char **out_json);

/**
 * Removes an agent's failed transition `from → to` in place. `event` may be
 * null to match every event of the agent; it is required for the `inter`
 * pseudo-agent. `out_removed` may be null.
 *
 * # Safety
 * `model` is a live handle; string arguments are null or valid
 * NUL-terminated strings; `out_removed` is null or valid for a write.
 */
enum SpecterStatus specter_model_inject(struct SpecterModel *model,
                                        const char *agent,
                                        const char *from,
                                        const char *to,
                                        const char *event,
                                        size_t *out_removed);

/**
 * Plans on a model. `initial` (`a|b|c` or `AGENT=state,...`) and `task`
 * (`AGENT=state,...`) may be null to use the defaults stored with the
 * model. `solver` is a [`SpecterSolver`] value.
 *
 * # Safety
 * `model` is a live handle; string arguments are null or valid
 * NUL-terminated strings; `out_plan` is valid for a pointer write.
 */
enum SpecterStatus specter_plan(const struct SpecterModel *model,
                                const char *initial,
                                const char *task,
                                int32_t solver,
                                struct SpecterPlan **out_plan);

/**
 * Releases a plan. Null is ignored.
 *
 * # Safety
 * `plan` is null or a handle from this library not yet freed.
 */
void specter_plan_free(struct SpecterPlan *plan);

/**
 * Total cost of the plan.
 *
 * # Safety
 * `plan` is a live handle; `out_cost` is valid for a write.
 */
enum SpecterStatus specter_plan_cost(const struct SpecterPlan *plan, double *out_cost);

/**
 * Number of modules in the plan, excluding the inverted task module.
 *
 * # Safety
 * `plan` is a live handle; `out_count` is valid for a write.
 */
enum SpecterStatus specter_plan_module_count(const struct SpecterPlan *plan, size_t *out_count);

/**
 * Serializes the plan document; release the string with
 * [`specter_string_free`].
 *
 * # Safety
 * `plan` is a live handle; `out_json` is valid for a pointer write.
 */
enum SpecterStatus specter_plan_serialize(const struct SpecterPlan *plan, char **out_json);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` is null or a string from this library not yet freed.
 */
void specter_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECTER_H */
