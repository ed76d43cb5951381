#ifndef MLCE_H
#define MLCE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MlceStatus {
  MLCE_STATUS_OK = 0,
  MLCE_STATUS_NULL_ARGUMENT = 1,
  MLCE_STATUS_INVALID_UTF8 = 2,
  MLCE_STATUS_PARSE_ERROR = 3,
  MLCE_STATUS_INPUT_ERROR = 4,
  MLCE_STATUS_UNSUPPORTED = 5,
  MLCE_STATUS_TIMEOUT = 6,
  MLCE_STATUS_INTERNAL = 7,
} MlceStatus;

typedef enum MlceMode {
  MLCE_MODE_MLCE = 0,
  MLCE_MODE_TCE = 1,
} MlceMode;

typedef enum MlceAlgo {
  MLCE_ALGO_AUTO = 0,
  MLCE_ALGO_BRANCH = 1,
  MLCE_ALGO_XP = 2,
  MLCE_ALGO_ORACLE = 3,
  MLCE_ALGO_STRUCTURED = 4,
} MlceAlgo;

// Opaque instance handle.
typedef struct MlceInstance MlceInstance;

// Opaque solver answer: either a solution or a negative answer, tied to the
// instance it was computed for.
typedef struct MlceSolution MlceSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call into this library on the
// same thread.
const char *mlce_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void mlce_string_free(char *s);

// Parses an instance from its text form.
//
// # Safety
// `text` must be a nul-terminated string; `out` must be writable.
enum MlceStatus mlce_instance_parse(const char *text, struct MlceInstance **out);

// # Safety
// `inst` must be null or a live handle from this library.
void mlce_instance_free(struct MlceInstance *inst);

// Canonical text form of an instance.
//
// # Safety
// `inst` must be a live handle; `out` must be writable.
enum MlceStatus mlce_instance_serialize(const struct MlceInstance *inst, char **out);

// Writes the vertex count, layer count and budgets. Any output pointer may be null.
//
// # Safety
// `inst` must be a live handle; non-null outputs must be writable.
enum MlceStatus mlce_instance_shape(const struct MlceInstance *inst,
                                    enum MlceMode *mode,
                                    size_t *n,
                                    size_t *ell,
                                    size_t *k,
                                    size_t *d);

// Solves an instance. A `timeout_seconds` of zero or less means no limit;
// limits apply to the branch and xp algorithms.
//
// # Safety
// `inst` must be a live handle; `out` must be writable.
enum MlceStatus mlce_solve(const struct MlceInstance *inst,
                           enum MlceAlgo algo,
                           double timeout_seconds,
                           struct MlceSolution **out);

// Parses a solution file for `inst`.
//
// # Safety
// `inst` must be a live handle, `text` nul-terminated, `out` writable.
enum MlceStatus mlce_solution_parse(const struct MlceInstance *inst,
                                    const char *text,
                                    struct MlceSolution **out);

// # Safety
// `sol` must be null or a live handle from this library.
void mlce_solution_free(struct MlceSolution *sol);

// 1 for a yes answer, 0 for no, -1 for a null handle.
//
// # Safety
// `sol` must be null or a live handle.
int32_t mlce_solution_is_yes(const struct MlceSolution *sol);

// Solution file text.
//
// # Safety
// `sol` must be a live handle; `out` must be writable.
enum MlceStatus mlce_solution_serialize(const struct MlceSolution *sol, char **out);

// Checks `sol` against `inst`; `*valid` becomes 1 or 0. A negative answer
// carries no certificate and is reported as an input error. On an invalid
// solution, [`mlce_last_error`] holds the violation report.
//
// # Safety
// Both handles must be live; `valid` must be writable.
enum MlceStatus mlce_verify(const struct MlceInstance *inst,
                            const struct MlceSolution *sol,
                            int32_t *valid);

// Kernelizes `inst`. On a trivial rejection `*out` is set to null and
// `*rejected` to 1; otherwise `*out` receives the kernel and `*rejected` 0.
//
// # Safety
// `inst` must be a live handle; `out` and `rejected` must be writable.
enum MlceStatus mlce_kernelize(const struct MlceInstance *inst,
                               struct MlceInstance **out,
                               int32_t *rejected);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MLCE_H */
