#ifndef YAMABE_H
#define YAMABE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Profile status kinds reported by [`yamabe_profile_status`].
#define YAMABE_PROFILE_COMPLETE 0

#define YAMABE_PROFILE_PHI_COLLAPSE 1

#define YAMABE_PROFILE_BLOWUP 2

// Suite bits for [`yamabe_instance_verify_json`].
#define YAMABE_SUITE_ALGEBRAIC 1

#define YAMABE_SUITE_SOLITON 2

#define YAMABE_SUITE_LEVELSET 4

#define YAMABE_SUITE_QUADRATURE 8

// Number of columns written by [`yamabe_profile_node`]:
// `r, φ, φ', φ'', f, f', f'', R`.
#define YAMABE_PROFILE_COLUMNS 8

// Result code of every fallible call.
typedef enum YamabeStatus {
  YAMABE_STATUS_OK = 0,
  YAMABE_STATUS_NULL_POINTER = 1,
  YAMABE_STATUS_INVALID_ARGUMENT = 2,
  YAMABE_STATUS_OUT_OF_DOMAIN = 3,
  YAMABE_STATUS_NOT_POSITIVE_DEFINITE = 4,
  YAMABE_STATUS_CRITICAL_POINT = 5,
  YAMABE_STATUS_WRONG_DIMENSION = 6,
  YAMABE_STATUS_PROFILE_ERROR = 7,
  YAMABE_STATUS_IO = 8,
  YAMABE_STATUS_EXPRESSION = 9,
  YAMABE_STATUS_PANIC = 10,
} YamabeStatus;

// Opaque soliton instance.
typedef struct YamabeInstance YamabeInstance;

// Opaque integrated profile.
typedef struct YamabeProfile YamabeProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *yamabe_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *yamabe_version(void);

// Free a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void yamabe_string_free(char *s);

// Integrate a radial profile.
//
// # Safety
// `out` must be a valid pointer; on success it receives a new handle.
enum YamabeStatus yamabe_profile_integrate(size_t n,
                                           double m,
                                           double rho,
                                           double q,
                                           double r_max,
                                           double h_r,
                                           struct YamabeProfile **out);

// Read a CSV written by [`yamabe_profile_write_csv`] or `yamabe construct`.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum YamabeStatus yamabe_profile_read_csv(const char *path,
                                          size_t n,
                                          double m,
                                          double rho,
                                          struct YamabeProfile **out);

// # Safety
// `p` must come from this library and not have been freed; NULL is ignored.
void yamabe_profile_free(struct YamabeProfile *p);

// # Safety
// Pointers must be valid.
enum YamabeStatus yamabe_profile_len(const struct YamabeProfile *p, size_t *out);

// Status kind (`YAMABE_PROFILE_*`) and, for early stops, the radius reached.
//
// # Safety
// Pointers must be valid.
enum YamabeStatus yamabe_profile_status(const struct YamabeProfile *p, int32_t *kind, double *r);

// Copy node `k` into `out[0..YAMABE_PROFILE_COLUMNS]`.
//
// # Safety
// `out` must hold `YAMABE_PROFILE_COLUMNS` doubles.
enum YamabeStatus yamabe_profile_node(const struct YamabeProfile *p, size_t k, double *out);

// # Safety
// `path` must be a NUL-terminated string.
enum YamabeStatus yamabe_profile_write_csv(const struct YamabeProfile *p, const char *path);

// Largest pointwise residual of the radial `L(R − ρ)` identity.
//
// # Safety
// Pointers must be valid.
enum YamabeStatus yamabe_profile_chain_residual(const struct YamabeProfile *p, double *out);

// Built-in instance by name, with its default constants. `seed` only
// matters for `RANDOMPOLY` entries.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum YamabeStatus yamabe_instance_catalog(const char *name,
                                          uint64_t seed,
                                          struct YamabeInstance **out);

// The warped-product instance of a profile.
//
// # Safety
// Pointers must be valid.
enum YamabeStatus yamabe_instance_from_profile(const struct YamabeProfile *p,
                                               struct YamabeInstance **out);

// # Safety
// `inst` must come from this library and not have been freed; NULL is ignored.
void yamabe_instance_free(struct YamabeInstance *inst);

// # Safety
// Pointers must be valid.
enum YamabeStatus yamabe_instance_dim(const struct YamabeInstance *inst, size_t *out);

// Max-abs of the soliton equation residual at `point[0..len]`.
//
// # Safety
// `point` must hold `len` doubles; `out` must be valid.
enum YamabeStatus yamabe_instance_soliton_residual(const struct YamabeInstance *inst,
                                                   const double *point,
                                                   size_t len,
                                                   double *out);

// Scalar curvature at `point[0..len]`.
//
// # Safety
// `point` must hold `len` doubles; `out` must be valid.
enum YamabeStatus yamabe_instance_scalar_curvature(const struct YamabeInstance *inst,
                                                   const double *point,
                                                   size_t len,
                                                   double *out);

// Run the suites selected by `suites` (`YAMABE_SUITE_*` bits) over `samples`
// seeded points. `out_json` receives the JSON report (free with
// [`yamabe_string_free`]); `out_pass` receives 1 if every check passed.
//
// # Safety
// Pointers must be valid.
enum YamabeStatus yamabe_instance_verify_json(const struct YamabeInstance *inst,
                                              uint32_t suites,
                                              size_t samples,
                                              uint64_t seed,
                                              char **out_json,
                                              int32_t *out_pass);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* YAMABE_H */
