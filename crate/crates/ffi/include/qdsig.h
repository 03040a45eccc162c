#ifndef QDSIG_H
#define QDSIG_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every entry point.
 */
typedef enum QdsStatus {
  QDS_STATUS_OK = 0,
  QDS_STATUS_NULL_POINTER = 1,
  QDS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Bit arrays holding something other than 0 or 1.
   */
  QDS_STATUS_INVALID_BITS = 3,
  QDS_STATUS_LENGTH_MISMATCH = 4,
  QDS_STATUS_WRONG_PHASE = 5,
  QDS_STATUS_PROTOCOL_FAILURE = 6,
  QDS_STATUS_PANIC = 7,
} QdsStatus;

typedef enum QdsBlame {
  QDS_BLAME_NONE = 0,
  QDS_BLAME_ALICE = 1,
  QDS_BLAME_BOB = 2,
  QDS_BLAME_INCONCLUSIVE = 3,
} QdsBlame;

typedef enum QdsAttack {
  QDS_ATTACK_HONEST = 0,
  QDS_ATTACK_NAIVE_FLIP = 1,
  QDS_ATTACK_COMPENSATED_FLIP = 2,
  QDS_ATTACK_AMBIGUOUS_STATE = 3,
  QDS_ATTACK_FALSE_ANNOUNCEMENT = 4,
  QDS_ATTACK_BOB_FORGE_SIGNATURE = 5,
  QDS_ATTACK_BOB_FORGE_MESSAGE = 6,
  QDS_ATTACK_MASQUERADE = 7,
} QdsAttack;

/**
 * Opaque session handle.
 */
typedef struct QdsSession QdsSession;

/**
 * Outcome of an honest verification and adjudication.
 */
typedef struct QdsVerdict {
  bool bob_accepts;
  bool charlie_accepts;
  enum QdsBlame blamed;
  /**
   * Positions failing each check; v3 counts stay 0 when Bob rejected.
   */
  size_t v1_failures;
  size_t v2_failures;
  size_t v3_failures;
  /**
   * 1 match, 0 mismatch, -1 not performed.
   */
  int32_t crosscheck;
} QdsVerdict;

/**
 * Monte Carlo aggregate for one strategy.
 */
typedef struct QdsTrialStats {
  size_t n;
  size_t mask_weight;
  uint64_t trials;
  uint64_t successes;
  double success_rate;
  double wilson_99_low;
  double wilson_99_high;
  uint64_t v1_fail;
  uint64_t v2_fail;
  uint64_t v3_fail;
  uint64_t crosscheck_fail;
  uint64_t unexpected_fail;
  /**
   * Rate predicted for this strategy.
   */
  double expected_rate;
  uint64_t seed;
} QdsTrialStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *qds_status_message(enum QdsStatus status);

/**
 * Library version as a NUL-terminated string.
 */
const char *qds_version(void);

/**
 * Prepares `n` controlled channels seeded by `seed` and stores a new handle
 * in `*out`.
 *
 * # Safety
 * `out` must be a valid pointer. The handle must be released with
 * [`qds_session_free`].
 */
enum QdsStatus qds_session_new(size_t n, uint64_t seed, struct QdsSession **out);

/**
 * # Safety
 * `session` must be null or a handle from [`qds_session_new`] not yet freed.
 */
void qds_session_free(struct QdsSession *session);

/**
 * Number of positions, or 0 for a null handle.
 *
 * # Safety
 * `session` must be null or a live handle.
 */
size_t qds_session_len(const struct QdsSession *session);

/**
 * Alice signs `message` (`len` bits): teleportation, Bob's measurement and
 * the public announcement.
 *
 * # Safety
 * `session` must be a live handle and `message` must point to `len` bytes.
 */
enum QdsStatus qds_session_sign(struct QdsSession *session, const uint8_t *message, size_t len);

/**
 * Copies the announced global signature into `out`.
 *
 * # Safety
 * `session` must be a live handle and `out` must point to `len` writable bytes.
 */
enum QdsStatus qds_session_signature(const struct QdsSession *session, uint8_t *out, size_t len);

/**
 * Copies Bob's measured signature into `out`.
 *
 * # Safety
 * `session` must be a live handle and `out` must point to `len` writable bytes.
 */
enum QdsStatus qds_session_bob_signature(const struct QdsSession *session,
                                         uint8_t *out,
                                         size_t len);

/**
 * Bob verifies Alice's pair, forwards it, and Charlie adjudicates with the
 * direct cross-check when `crosscheck` is true. The verdict is written to
 * `*out`.
 *
 * # Safety
 * `session` must be a live handle and `out` a valid pointer.
 */
enum QdsStatus qds_session_verify(struct QdsSession *session,
                                  bool crosscheck,
                                  struct QdsVerdict *out);

/**
 * Classical prediction of an honest run from `message`, Alice's parities
 * and Charlie's parities, all `len` bits.
 *
 * # Safety
 * Inputs must point to `len` readable bytes; outputs to `len` writable bytes.
 */
enum QdsStatus qds_oracle_honest(const uint8_t *message,
                                 const uint8_t *a_p,
                                 const uint8_t *c_p,
                                 size_t len,
                                 uint8_t *out_global,
                                 uint8_t *out_bob);

/**
 * Runs `trials` seeded sessions of `attack` on `n` positions.
 *
 * `mask` selects the attacked positions (`n` bytes); null means all.
 * `threads` of 0 or 1 runs sequentially; results do not depend on it.
 *
 * # Safety
 * `mask` must be null or point to `n` bytes; `out` must be a valid pointer.
 */
enum QdsStatus qds_monte_carlo(enum QdsAttack attack,
                               size_t n,
                               const uint8_t *mask,
                               uint64_t trials,
                               uint64_t seed,
                               bool crosscheck,
                               size_t threads,
                               struct QdsTrialStats *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QDSIG_H */
