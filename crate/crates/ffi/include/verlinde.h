#ifndef VERLINDE_H
#define VERLINDE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VerlindeStatus {
  VERLINDE_STATUS_OK = 0,
  VERLINDE_STATUS_NULL_POINTER = 1,
  VERLINDE_STATUS_INVALID_INPUT = 2,
  VERLINDE_STATUS_COMPUTATION = 3,
  VERLINDE_STATUS_PRECISION = 4,
  VERLINDE_STATUS_PANIC = 5,
} VerlindeStatus;

/*
 A validated `(r, g, k, λ)`.
 */
typedef struct VerlindeHandle VerlindeHandle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread; empty after success.
 Valid until the next call on the same thread.
 */
const char *verlinde_last_error(void);

/*
 Library version, static storage.
 */
const char *verlinde_version(void);

/*
 Builds an input from `r` weight entries summing to zero.

 # Safety
 `lambda` points to `r` readable `int64_t`; `out` is writable.
 */
enum VerlindeStatus verlinde_input_new(uint32_t g,
                                       uint64_t k,
                                       const int64_t *lambda,
                                       size_t r,
                                       struct VerlindeHandle **out);

/*
 # Safety
 `h` is null or came from [`verlinde_input_new`] and is not used afterwards.
 */
void verlinde_input_free(struct VerlindeHandle *h);

/*
 Residue route at the chamber of `λ̂/k̂`, as `"p/q"`.

 # Safety
 `h` is a live handle; `out` is writable.
 */
enum VerlindeStatus verlinde_ver_residue(const struct VerlindeHandle *h, char **out);

/*
 Trigonometric sum at `bits` of precision: the nearest integer as a decimal
 string and the certified error bound.

 # Safety
 `h` is a live handle; `out` and `err_bound` are writable.
 */
enum VerlindeStatus verlinde_ver_sum(const struct VerlindeHandle *h,
                                     size_t bits,
                                     char **out,
                                     double *err_bound);

/*
 Chamber polynomial at the regular point `c_i = num_i / den` of `V*`,
 summed over the Hamiltonian basis `H_m`.

 # Safety
 `h` is a live handle; `num` points to `r` readable `int64_t`; `out` is writable.
 */
enum VerlindeStatus verlinde_chamber_value(const struct VerlindeHandle *h,
                                           const int64_t *num,
                                           int64_t den,
                                           size_t m,
                                           char **out);

/*
 # Safety
 `s` is null or a string returned by this library, freed once.
 */
void verlinde_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VERLINDE_H */
