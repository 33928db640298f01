#ifndef PME_H
#define PME_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Four-qubit family labels.
 */
typedef enum PmeFamily {
  PME_FAMILY_FAMILY_A = 0,
  PME_FAMILY_FAMILY_A_SHIFTED = 1,
  PME_FAMILY_FAMILY_B = 2,
  PME_FAMILY_INTERSECTION = 3,
  PME_FAMILY_PME_UNCLASSIFIED = 4,
  PME_FAMILY_NOT_PME = 5,
} PmeFamily;

/**
 * Result code of every fallible call.
 */
typedef enum PmeStatus {
  PME_STATUS_OK = 0,
  PME_STATUS_NULL_POINTER = 1,
  PME_STATUS_INVALID_INPUT = 2,
  PME_STATUS_PRECONDITION = 3,
  PME_STATUS_VERIFICATION = 4,
  PME_STATUS_UNAUTHORIZED = 5,
  PME_STATUS_RESOURCE = 6,
  PME_STATUS_PARSE = 7,
  PME_STATUS_IO = 8,
  PME_STATUS_BUFFER_TOO_SMALL = 9,
  PME_STATUS_PANIC = 10,
} PmeStatus;

/**
 * Opaque pure state.
 */
typedef struct PmeState PmeState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *pme_last_error(void);

/**
 * # Safety
 * `state` must come from a `pme_state_*` constructor and not be freed twice.
 */
void pme_state_free(struct PmeState *state);

/**
 * # Safety
 * `out` must be writable.
 */
enum PmeStatus pme_state_ghz(size_t n, size_t d, struct PmeState **out);

/**
 * `2n` sites with Bell pairs on `(k, k+n)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PmeStatus pme_state_dimerized_bell(size_t n, size_t d, struct PmeState **out);

/**
 * Gate chain on the `2n`-site dimer with seeded Haar unitaries; matches
 * `pme construct circuit-psi --seed`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PmeStatus pme_state_circuit_psi(size_t n, size_t d, uint64_t seed, struct PmeState **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum PmeStatus pme_state_circuit_xi(size_t n, size_t d, uint64_t seed, struct PmeState **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum PmeStatus pme_state_family_b(double phi,
                                  double alpha,
                                  double beta,
                                  double gamma,
                                  double delta,
                                  struct PmeState **out);

/**
 * Copies `d^n` interleaved amplitudes into a new state. No normalization
 * is applied.
 *
 * # Safety
 * `re_im` must hold `2 d^n` doubles; `out` must be writable.
 */
enum PmeStatus pme_state_from_amplitudes(size_t n,
                                         size_t d,
                                         const double *re_im,
                                         struct PmeState **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum PmeStatus pme_state_read(const char *path, struct PmeState **out);

/**
 * # Safety
 * `state` must be a live handle; `path` a NUL-terminated string.
 */
enum PmeStatus pme_state_write(const struct PmeState *state, const char *path);

/**
 * Site count, local dimension and amplitude count.
 *
 * # Safety
 * `state` must be a live handle; the outputs must be writable.
 */
enum PmeStatus pme_state_shape(const struct PmeState *state,
                               size_t *num_sites,
                               size_t *local_dim,
                               size_t *len);

/**
 * Writes the amplitudes as interleaved pairs into `re_im`, which must hold
 * `2 * capacity` doubles; fails with `PME_STATUS_BUFFER_TOO_SMALL` when
 * `capacity` is below the amplitude count.
 *
 * # Safety
 * `state` must be a live handle; `re_im` must hold `2 * capacity` doubles.
 */
enum PmeStatus pme_state_amplitudes(const struct PmeState *state, double *re_im, size_t capacity);

/**
 * Planar check over all connected half windows. `max_deviation` may be null.
 *
 * # Safety
 * `state` must be a live handle; `pass` must be writable.
 */
enum PmeStatus pme_verify_pme(const struct PmeState *state,
                              double tol,
                              bool *pass,
                              double *max_deviation);

/**
 * Check over every subset of half the sites. `max_deviation` may be null.
 *
 * # Safety
 * `state` must be a live handle; `pass` must be writable.
 */
enum PmeStatus pme_verify_ame(const struct PmeState *state,
                              double tol,
                              bool *pass,
                              double *max_deviation);

/**
 * # Safety
 * `state` must be a live handle; `family` must be writable.
 */
enum PmeStatus pme_classify_four_qubit(const struct PmeState *state,
                                       double tol,
                                       enum PmeFamily *family);

/**
 * Fidelity with the canonical pair after undoing the transfer unitary of
 * the half window starting at `start`.
 *
 * # Safety
 * `state` must be a live handle; `fid` must be writable.
 */
enum PmeStatus pme_teleport_fidelity(const struct PmeState *state, size_t start, double *fid);

/**
 * Encodes `secret` (`d` interleaved pairs) at `distributor`, decodes on the
 * players `window[0..window_len]` and writes the recovered qudit into
 * `recovered` (`2d` doubles) and the player holding it into `bob`.
 *
 * # Safety
 * `state` must be a live handle and every buffer sized as described.
 */
enum PmeStatus pme_qss_round_trip(const struct PmeState *state,
                                  size_t distributor,
                                  const double *secret,
                                  const size_t *window,
                                  size_t window_len,
                                  double *recovered,
                                  size_t *bob);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PME_H */
