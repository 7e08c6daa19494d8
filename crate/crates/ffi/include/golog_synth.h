#ifndef GOLOG_SYNTH_H
#define GOLOG_SYNTH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GsStatus {
  GS_STATUS_OK = 0,
  GS_STATUS_NULL_ARGUMENT = 1,
  GS_STATUS_INVALID_INPUT = 2,
  GS_STATUS_RESOURCE_LIMIT = 3,
  GS_STATUS_INTERNAL = 4,
  GS_STATUS_PANIC = 5,
} GsStatus;

typedef enum GsOrder {
  GS_ORDER_SMYTH = 0,
  GS_ORDER_HOARE = 1,
} GsOrder;

typedef enum GsLabelRule {
  GS_LABEL_RULE_EXISTENTIAL = 0,
  GS_LABEL_RULE_UNIVERSAL = 1,
} GsLabelRule;

typedef enum GsVerdict {
  GS_VERDICT_CONTROLLABLE = 0,
  GS_VERDICT_UNCONTROLLABLE = 1,
} GsVerdict;

/**
 * Opaque grounded problem.
 */
typedef struct GsProblem GsProblem;

/**
 * Opaque synthesis result.
 */
typedef struct GsResult GsResult;

/**
 * Search options; pass `NULL` to [`gs_synthesize`] for the defaults.
 */
typedef struct GsOptions {
  enum GsOrder order;
  enum GsLabelRule label_rule;
  uint64_t max_nodes;
} GsOptions;

typedef struct GsStats {
  uint64_t nodes_created;
  uint64_t nodes_expanded;
  uint64_t nodes_pruned;
  uint64_t max_depth;
  uint64_t wall_time_us;
} GsStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *gs_version(void);

/**
 * Message of the last failed call on this thread, or `NULL`. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *gs_last_error_message(void);

/**
 * Parses, validates and grounds a problem.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GsStatus gs_problem_from_source(const char *source, struct GsProblem **out);

/**
 * # Safety
 * `problem` must come from [`gs_problem_from_source`] and not be used
 * afterwards. `NULL` is ignored.
 */
void gs_problem_free(struct GsProblem *problem);

/**
 * Decides controllability.
 *
 * # Safety
 * `problem` must be a live handle, `options` `NULL` or a valid pointer
 * whose enum fields hold declared enumerators, and `out` a valid pointer.
 */
enum GsStatus gs_synthesize(const struct GsProblem *problem,
                            const struct GsOptions *options,
                            struct GsResult **out);

/**
 * Default options.
 */
struct GsOptions gs_options_default(void);

/**
 * # Safety
 * `result` must be a live handle.
 */
enum GsVerdict gs_result_verdict(const struct GsResult *result);

/**
 * Controller as JSON, or `NULL` if the problem is uncontrollable. Release
 * with [`gs_string_free`].
 *
 * # Safety
 * `result` must be a live handle.
 */
char *gs_result_controller_json(const struct GsResult *result);

/**
 * Witness path, one action per line followed by `violation` or
 * `deadlock`; empty if controllable. Release with [`gs_string_free`].
 *
 * # Safety
 * `result` must be a live handle.
 */
char *gs_result_witness(const struct GsResult *result);

/**
 * # Safety
 * `result` must be a live handle and `out` a valid pointer.
 */
enum GsStatus gs_result_stats(const struct GsResult *result, struct GsStats *out);

/**
 * # Safety
 * `result` must come from [`gs_synthesize`] and not be used afterwards.
 * `NULL` is ignored.
 */
void gs_result_free(struct GsResult *result);

/**
 * Evaluates the bad formula on the fluent trace induced by `trace`
 * (`t: action(args)` per line). Sets `*bad` to 1 if it holds. Fails with
 * [`GsStatus::Internal`] if the formula checker and automaton disagree.
 *
 * # Safety
 * `problem` must be a live handle, `trace` a NUL-terminated string and
 * `bad` a valid pointer.
 */
enum GsStatus gs_check_trace(const struct GsProblem *problem, const char *trace, int32_t *bad);

/**
 * # Safety
 * `s` must be a string returned by this library, or `NULL`.
 */
void gs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GOLOG_SYNTH_H */
