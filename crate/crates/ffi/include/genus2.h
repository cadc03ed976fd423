#ifndef GENUS2_H
#define GENUS2_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes.
typedef enum G2Status {
  G2_STATUS_OK = 0,
  G2_STATUS_NULL_POINTER = 1,
  G2_STATUS_INVALID_INPUT = 2,
  G2_STATUS_DOMAIN_ERROR = 3,
  G2_STATUS_NON_CONVERGENCE = 4,
  G2_STATUS_BRANCH_ERROR = 5,
  G2_STATUS_VALUATION_ERROR = 6,
  G2_STATUS_INDEX_ERROR = 7,
  G2_STATUS_CAP_EXCEEDED = 8,
  G2_STATUS_FIT_ERROR = 9,
  // a verify suite ran but some check failed
  G2_STATUS_CHECK_FAILED = 10,
  G2_STATUS_PANIC = 99,
} G2Status;

// A two-tori (eps) sewing point with its evaluator.
typedef struct G2EpsSurface G2EpsSurface;

// Positive definite even lattice.
typedef struct G2Lattice G2Lattice;

// A self-sewn torus (rho) point with its evaluator.
typedef struct G2RhoSurface G2RhoSurface;

// Truncation settings; see [`g2_policy_default`].
typedef struct G2Policy {
  // relative stability demanded between successive truncations
  double tol;
  // first truncation size
  size_t n_start;
  // largest truncation size
  size_t cap;
} G2Policy;

typedef struct G2Complex {
  double re;
  double im;
} G2Complex;

// Symmetric 2x2 period matrix.
typedef struct G2PeriodMatrix {
  struct G2Complex o11;
  struct G2Complex o12;
  struct G2Complex o22;
} G2PeriodMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *g2_last_error(void);

// The library's default truncation settings.
struct G2Policy g2_policy_default(void);

// Creates an eps surface; `policy` may be null for the defaults.
//
// # Safety
// `policy` is null or valid; `out_surface` is a valid pointer.
enum G2Status g2_eps_new(struct G2Complex tau1,
                         struct G2Complex tau2,
                         struct G2Complex eps,
                         const struct G2Policy *policy,
                         struct G2EpsSurface **out_surface);

// # Safety
// `s` is null or came from [`g2_eps_new`] and is not used afterwards.
void g2_eps_free(struct G2EpsSurface *s);

// Period matrix, `det(I - A1 A2)` and the truncation size used.
//
// # Safety
// `s` is a live handle; out-pointers are valid or null (null ones are skipped).
enum G2Status g2_eps_period_matrix(struct G2EpsSurface *s,
                                   struct G2PeriodMatrix *out_omega,
                                   struct G2Complex *out_det,
                                   size_t *out_truncation);

// Partition function of the rank `c` boson.
//
// # Safety
// `s` is a live handle and `out_z` a valid pointer.
enum G2Status g2_eps_partition_boson(struct G2EpsSurface *s, double c, struct G2Complex *out_z);

// `1 / (eta(tau1)^2 eta(tau2)^2 det(I - A1 A2))`.
//
// # Safety
// `s` is a live handle and `out_z` a valid pointer.
enum G2Status g2_eps_partition_modular(struct G2EpsSurface *s, struct G2Complex *out_z);

// Lattice theory partition function.
//
// # Safety
// `s` and `lat` are live handles and `out_z` a valid pointer.
enum G2Status g2_eps_partition_lattice(struct G2EpsSurface *s,
                                       const struct G2Lattice *lat,
                                       struct G2Complex *out_z);

// Creates a rho surface; `policy` may be null for the defaults.
//
// # Safety
// `policy` is null or valid; `out_surface` is a valid pointer.
enum G2Status g2_rho_new(struct G2Complex tau,
                         struct G2Complex w,
                         struct G2Complex rho,
                         const struct G2Policy *policy,
                         struct G2RhoSurface **out_surface);

// # Safety
// `s` is null or came from [`g2_rho_new`] and is not used afterwards.
void g2_rho_free(struct G2RhoSurface *s);

// Period matrix, `det(I - R)` and the truncation size used.
//
// # Safety
// `s` is a live handle; out-pointers are valid or null (null ones are skipped).
enum G2Status g2_rho_period_matrix(struct G2RhoSurface *s,
                                   struct G2PeriodMatrix *out_omega,
                                   struct G2Complex *out_det,
                                   size_t *out_truncation);

// Partition function of the rank `c` boson.
//
// # Safety
// `s` is a live handle and `out_z` a valid pointer.
enum G2Status g2_rho_partition_boson(struct G2RhoSurface *s, double c, struct G2Complex *out_z);

// `1 / (eta(tau)^2 det(I - R))`.
//
// # Safety
// `s` is a live handle and `out_z` a valid pointer.
enum G2Status g2_rho_partition_modular(struct G2RhoSurface *s, struct G2Complex *out_z);

// Lattice theory partition function.
//
// # Safety
// `s` and `lat` are live handles and `out_z` a valid pointer.
enum G2Status g2_rho_partition_lattice(struct G2RhoSurface *s,
                                       const struct G2Lattice *lat,
                                       struct G2Complex *out_z);

// Reads a lattice from JSON `{"rank": l, "gram": [[...]]}`.
//
// # Safety
// `json` is a NUL-terminated string; `out_lattice` is a valid pointer.
enum G2Status g2_lattice_from_json(const char *json, struct G2Lattice **out_lattice);

// # Safety
// `lat` is null or came from [`g2_lattice_from_json`] and is not used afterwards.
void g2_lattice_free(struct G2Lattice *lat);

// Runs a check suite (`modular`, `graphs`, `oracle`, `comparison`, `catalan`,
// `holomorphy`) and hands back its JSON report, to be released with
// [`g2_string_free`]. Returns `CheckFailed` when the report does not pass.
//
// # Safety
// `suite` is a NUL-terminated string; `out_json` is a valid pointer.
enum G2Status g2_verify(const char *suite, char **out_json);

// # Safety
// `s` is null or a string returned by this library, not used afterwards.
void g2_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GENUS2_H */
