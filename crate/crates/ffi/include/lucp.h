#ifndef LUCP_H
#define LUCP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LucpCommand {
  LUCP_COMMAND_VALIDATE = 0,
  LUCP_COMMAND_COHOMOLOGY = 1,
  LUCP_COMMAND_CROSSED_PRODUCT = 2,
  LUCP_COMMAND_SEQUENCE_CHECK = 3,
  LUCP_COMMAND_REPORT = 4,
} LucpCommand;

typedef enum LucpStatus {
  LUCP_STATUS_OK = 0,
  LUCP_STATUS_NULL_ARGUMENT = 1,
  LUCP_STATUS_INVALID_UTF8 = 2,
  LUCP_STATUS_PARSE = 3,
  LUCP_STATUS_VALIDATION = 4,
  LUCP_STATUS_SIZE_CAP = 5,
  LUCP_STATUS_IO = 6,
  LUCP_STATUS_COMPUTATION = 7,
  LUCP_STATUS_PANIC = 8,
  LUCP_STATUS_INVALID_INPUT = 9,
} LucpStatus;

/**
 * A validated instance.
 */
typedef struct LucpInstance LucpInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates an instance from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LucpStatus lucp_instance_from_json(const char *json, struct LucpInstance **out);

/**
 * Loads and validates an instance file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LucpStatus lucp_instance_load(const char *path, struct LucpInstance **out);

/**
 * The builtin skew group ring of `F_{p^n}` over its Frobenius group.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum LucpStatus lucp_instance_galois(uint64_t p, size_t n, struct LucpInstance **out);

/**
 * Runs a command and returns the JSON bundle in `out_json`.
 *
 * `verdict` receives 0 for pass, 1 for fail and 2 for undecided. The caps stored in the
 * instance are used, with the seed replaced by `seed`.
 *
 * # Safety
 * `inst` must come from this library; `out_json` and `verdict` must be valid pointers.
 */
enum LucpStatus lucp_run(const struct LucpInstance *inst,
                         enum LucpCommand command,
                         uint64_t seed,
                         char **out_json,
                         int32_t *verdict);

/**
 * Canonical JSON of the instance.
 *
 * # Safety
 * `inst` must come from this library and `out_json` must be a valid pointer.
 */
enum LucpStatus lucp_instance_to_json(const struct LucpInstance *inst, char **out_json);

/**
 * Releases an instance. Null is ignored.
 *
 * # Safety
 * `inst` must come from this library and not be used afterwards.
 */
void lucp_instance_free(struct LucpInstance *inst);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void lucp_string_free(char *s);

/**
 * Message of the last failed call on this thread, or null.
 */
const char *lucp_last_error(void);

const char *lucp_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LUCP_H */
