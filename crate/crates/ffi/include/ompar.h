#ifndef OMPAR_H
#define OMPAR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum OmparStatus {
  OMPAR_STATUS_OK = 0,
  OMPAR_STATUS_NULL_ARGUMENT = 1,
  OMPAR_STATUS_INVALID_UTF8 = 2,
  OMPAR_STATUS_PARSE_ERROR = 3,
  OMPAR_STATUS_PIPELINE_ERROR = 4,
  OMPAR_STATUS_PANIC = 5,
} OmparStatus;

/*
 A parsed and analyzed translation unit.
 */
typedef struct OmparSource OmparSource;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Parse and analyze NUL-terminated C source.

 # Safety
 `text` must be a valid NUL-terminated string; `out` must be writable.
 */
enum OmparStatus ompar_source_parse(const char *text, struct OmparSource **out);

/*
 Release a source. Null is ignored.

 # Safety
 `src` must come from [`ompar_source_parse`] and not be freed twice.
 */
void ompar_source_free(struct OmparSource *src);

/*
 Number of canonical loops found.

 # Safety
 `src` must be a live source; `out` must be writable.
 */
enum OmparStatus ompar_source_loop_count(const struct OmparSource *src, size_t *out);

/*
 Per-loop analysis and verdicts as JSON.

 # Safety
 `src` must be a live source; `out_json` must be writable.
 */
enum OmparStatus ompar_analyze_json(const struct OmparSource *src, char **out_json);

/*
 Rewrite with the offline backend and the bundled corpus.

 # Safety
 `src` must be a live source; both out pointers must be writable.
 */
enum OmparStatus ompar_parallelize_offline(const struct OmparSource *src,
                                           char **out_text,
                                           size_t *out_injected);

/*
 Release a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not be freed twice.
 */
void ompar_string_free(char *s);

/*
 Message for the last failure on this thread, or null. Valid until the
 next call into the library on the same thread.
 */
const char *ompar_last_error_message(void);

/*
 Library version, statically allocated.
 */
const char *ompar_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OMPAR_H */
