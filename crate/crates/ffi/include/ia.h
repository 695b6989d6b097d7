#ifndef IA_H
#define IA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes.
 */
typedef enum IaStatus {
  IA_STATUS_OK = 0,
  IA_STATUS_NULL_ARGUMENT = 1,
  IA_STATUS_INVALID_UTF8 = 2,
  IA_STATUS_PARSE = 3,
  IA_STATUS_ALPHABET_MISMATCH = 4,
  IA_STATUS_DELTA_NAME_CLASH = 5,
  IA_STATUS_NOT_INPUT_ENABLED = 6,
  IA_STATUS_UNKNOWN_RELATION = 7,
  IA_STATUS_INTERNAL = 8,
} IaStatus;

/*
 Verdict of a check, numbered like the `ia` exit codes.
 */
typedef enum IaVerdict {
  IA_VERDICT_HOLDS = 0,
  IA_VERDICT_FAILS = 1,
  IA_VERDICT_INCONCLUSIVE = 3,
} IaVerdict;

/*
 A parsed interface automaton.
 */
typedef struct IaAutomaton IaAutomaton;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Parses the text format into a new handle stored in `*out`.

 # Safety
 `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum IaStatus ia_automaton_parse(const char *text, struct IaAutomaton **out);

/*
 Releases a handle. Null is ignored.

 # Safety
 `a` must come from this library and not be used afterwards.
 */
void ia_automaton_free(struct IaAutomaton *a);

/*
 Number of states, or 0 for a null handle.

 # Safety
 `a` must be null or a live handle.
 */
size_t ia_automaton_num_states(const struct IaAutomaton *a);

/*
 Canonical text form.

 # Safety
 `a` must be a live handle and `out` a valid pointer.
 */
enum IaStatus ia_automaton_serialize(const struct IaAutomaton *a, char **out);

/*
 Graphviz rendering. `delta_name` may be null for the default `delta`.

 # Safety
 `a` must be a live handle, `delta_name` null or NUL-terminated, `out` valid.
 */
enum IaStatus ia_automaton_to_dot(const struct IaAutomaton *a, const char *delta_name, char **out);

/*
 Quiescence closure. `delta_name` may be null for the default `delta`.

 # Safety
 `a` must be a live handle, `delta_name` null or NUL-terminated, `out` valid.
 */
enum IaStatus ia_delta_closure(const struct IaAutomaton *a,
                               const char *delta_name,
                               struct IaAutomaton **out);

/*
 Subset construction.

 # Safety
 `a` must be a live handle and `out` a valid pointer.
 */
enum IaStatus ia_determinize(const struct IaAutomaton *a, struct IaAutomaton **out);

/*
 Subset construction keeping only inputs enabled in every member state.

 # Safety
 `a` must be a live handle and `out` a valid pointer.
 */
enum IaStatus ia_determinize_iu(const struct IaAutomaton *a, struct IaAutomaton **out);

/*
 Checks `relation` (`if`, `iuoe`, `equiv-if`, `uioco`, `ioco`, `as`,
 `atc`, `tb` or `all`) between `implementation` and `specification`.
 Writes the verdict as JSON to `*json_out` and, when `verdict_out` is not
 null, its status. For `all` the JSON is the full report and the status
 is `Holds` when the implications between the relations are respected;
 otherwise `Internal` is returned together with the report.

 # Safety
 Handles must be live, `relation` NUL-terminated, `json_out` valid and
 `verdict_out` null or valid.
 */
enum IaStatus ia_check(const char *relation,
                       const struct IaAutomaton *implementation,
                       const struct IaAutomaton *specification,
                       size_t depth,
                       enum IaVerdict *verdict_out,
                       char **json_out);

/*
 Message for the last failure on this thread; empty if none. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *ia_last_error(void);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void ia_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IA_H */
