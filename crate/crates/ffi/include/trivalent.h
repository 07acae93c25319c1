#ifndef TRIVALENT_H
#define TRIVALENT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Include the proof of an empty product.
 */
#define TV_EMIT_PROOF 1

/*
 Include the counterexample lasso.
 */
#define TV_EMIT_COUNTEREXAMPLE 2

/*
 Include both product graphs.
 */
#define TV_EMIT_PRODUCT 4

/*
 Treat validation warnings as errors.
 */
#define TV_STRICT_VALIDATE 8

/*
 Status of every fallible call. Input and internal errors share their
 values with the CLI exit codes.
 */
typedef enum TvStatus {
  TV_STATUS_OK = 0,
  TV_STATUS_INPUT_ERROR = 2,
  TV_STATUS_INTERNAL_ERROR = 3,
  TV_STATUS_NULL_ARGUMENT = 4,
  TV_STATUS_INVALID_UTF8 = 5,
  TV_STATUS_PANIC = 6,
} TvStatus;

typedef enum TvVerdict {
  TV_VERDICT_TRUE = 0,
  TV_VERDICT_FALSE = 1,
  TV_VERDICT_MAYBE = 2,
} TvVerdict;

/*
 Opaque result of `tv_check`.
 */
typedef struct TvResult TvResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Checks `property` on the model document `model_json`.

 `automaton_json` may be null; otherwise it replaces the automaton
 translated from the negated property. `flags` combines the `TV_*`
 constants; with no emit flag the proof and counterexample are included.
 On success `*out` receives a result to release with `tv_result_free`;
 on failure `*out` is set to null and `tv_last_error` describes why.

 # Safety
 String arguments must be null or NUL-terminated; `out` must be null or
 point to writable storage for one pointer.
 */
enum TvStatus tv_check(const char *model_json,
                       const char *property,
                       const char *automaton_json,
                       uint32_t flags,
                       struct TvResult **out);

/*
 Writes the verdict of `result` to `*verdict`.

 # Safety
 `result` must be null or a live result from `tv_check`; `verdict` must be
 null or writable.
 */
enum TvStatus tv_result_verdict(const struct TvResult *result, enum TvVerdict *verdict);

/*
 The JSON result document, or null when `result` is null.

 # Safety
 `result` must be null or a live result from `tv_check`.
 */
const char *tv_result_json(const struct TvResult *result);

/*
 The markdown rendering, or null when `result` is null.

 # Safety
 `result` must be null or a live result from `tv_check`.
 */
const char *tv_result_markdown(const struct TvResult *result);

/*
 The plain-text rendering, or null when `result` is null.

 # Safety
 `result` must be null or a live result from `tv_check`.
 */
const char *tv_result_plain(const struct TvResult *result);

/*
 Releases a result. Null is ignored.

 # Safety
 `result` must be null or a result from `tv_check` not freed before.
 */
void tv_result_free(struct TvResult *result);

/*
 Message of the last failed call on this thread, or null.
 */
const char *tv_last_error(void);

/*
 Library version, a static string.
 */
const char *tv_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRIVALENT_H */
