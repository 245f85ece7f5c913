#ifndef S2SCAT_H
#define S2SCAT_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every fallible call.
 */
typedef enum S2scatStatus {
  S2SCAT_STATUS_OK = 0,
  S2SCAT_STATUS_NULL_POINTER = 1,
  S2SCAT_STATUS_INVALID_ARGUMENT = 2,
  S2SCAT_STATUS_DIMENSION = 3,
  S2SCAT_STATUS_INVALID_CONFIG = 4,
  S2SCAT_STATUS_INCOMPATIBLE = 5,
  S2SCAT_STATUS_FORMAT = 6,
  S2SCAT_STATUS_IO = 7,
  S2SCAT_STATUS_BUFFER_TOO_SMALL = 8,
  S2SCAT_STATUS_PANIC = 9,
} S2scatStatus;

typedef enum S2scatScheme {
  S2SCAT_SCHEME_MW = 0,
  S2SCAT_SCHEME_GL = 1,
} S2scatScheme;

typedef enum S2scatPolicy {
  S2SCAT_POLICY_GENERAL = 0,
  S2SCAT_POLICY_DESCENDING = 1,
  S2SCAT_POLICY_ADJACENT_DESCENDING = 2,
} S2scatPolicy;

/**
 * Band-limited harmonic coefficients.
 */
typedef struct S2scatCoefficients S2scatCoefficients;

/**
 * Axisymmetric wavelet filter bank.
 */
typedef struct S2scatFilterBank S2scatFilterBank;

/**
 * Scattering channels in lexicographic path order.
 */
typedef struct S2scatScattering S2scatScattering;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *s2scat_version(void);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *s2scat_last_error_message(void);

/**
 * Number of coefficients `L^2` at band-limit `L`.
 */
size_t s2scat_coefficient_count(size_t bandlimit);

/**
 * Rings and longitudes of the sampling grid at band-limit `L`.
 */
enum S2scatStatus s2scat_grid_shape(size_t bandlimit,
                                    enum S2scatScheme grid_scheme,
                                    size_t *n_theta,
                                    size_t *n_phi);

/**
 * Gaussian coefficients of a real field with unit flat spectrum.
 */
enum S2scatStatus s2scat_coefficients_random(size_t bandlimit,
                                             uint64_t seed,
                                             struct S2scatCoefficients **out);

/**
 * Coefficients from `L^2` interleaved complex values; `real` declares a
 * real field.
 */
enum S2scatStatus s2scat_coefficients_from_values(size_t bandlimit,
                                                  const double *values,
                                                  size_t n_values,
                                                  bool real,
                                                  struct S2scatCoefficients **out);

size_t s2scat_coefficients_bandlimit(const struct S2scatCoefficients *c);

/**
 * Copies the `L^2` values into `out` (room for `capacity` complex values).
 */
enum S2scatStatus s2scat_coefficients_values(const struct S2scatCoefficients *c,
                                             double *out,
                                             size_t capacity);

/**
 * `R(alpha, beta, gamma) f` in the zyz convention.
 */
enum S2scatStatus s2scat_coefficients_rotate(const struct S2scatCoefficients *c,
                                             double alpha,
                                             double beta,
                                             double gamma,
                                             struct S2scatCoefficients **out);

/**
 * Samples on the grid at band-limit `grid_bandlimit >= L`, theta-major.
 */
enum S2scatStatus s2scat_inverse_sht(const struct S2scatCoefficients *c,
                                     enum S2scatScheme grid_scheme,
                                     size_t grid_bandlimit,
                                     double *out,
                                     size_t capacity);

/**
 * Exact analysis of `n_samples` theta-major samples on the grid at
 * band-limit `L`.
 */
enum S2scatStatus s2scat_forward_sht(const double *samples,
                                     size_t n_samples,
                                     size_t bandlimit,
                                     enum S2scatScheme grid_scheme,
                                     struct S2scatCoefficients **out);

void s2scat_coefficients_free(struct S2scatCoefficients *c);

/**
 * Filter bank for `(L, alpha, J0)`.
 */
enum S2scatStatus s2scat_filter_bank_new(size_t bandlimit,
                                         double alpha,
                                         size_t j0,
                                         struct S2scatFilterBank **out);

/**
 * Writes `J0`, `J` and `L0` of the bank; any output may be null.
 */
enum S2scatStatus s2scat_filter_bank_scales(const struct S2scatFilterBank *b,
                                            size_t *j0,
                                            size_t *j_max,
                                            size_t *l0);

/**
 * Largest deviation of the tiling sum from one.
 */
enum S2scatStatus s2scat_filter_bank_admissibility(const struct S2scatFilterBank *b,
                                                   double *residual);

void s2scat_filter_bank_free(struct S2scatFilterBank *b);

/**
 * Scattering network of depth `depth` over the bank's scales.
 */
enum S2scatStatus s2scat_scattering_new(const struct S2scatCoefficients *c,
                                        const struct S2scatFilterBank *b,
                                        int64_t depth,
                                        enum S2scatPolicy path_policy,
                                        bool multires,
                                        size_t oversample,
                                        struct S2scatScattering **out);

size_t s2scat_scattering_channel_count(const struct S2scatScattering *s);

/**
 * Band-limit `L0` shared by every channel.
 */
size_t s2scat_scattering_channel_bandlimit(const struct S2scatScattering *s);

/**
 * Depth of channel `index`; writes up to `capacity` scales into `scales`.
 */
enum S2scatStatus s2scat_scattering_channel_path(const struct S2scatScattering *s,
                                                 size_t index,
                                                 size_t *depth,
                                                 size_t *scales,
                                                 size_t capacity);

/**
 * Copies the `L0^2` coefficients of channel `index`.
 */
enum S2scatStatus s2scat_scattering_channel_values(const struct S2scatScattering *s,
                                                   size_t index,
                                                   double *out,
                                                   size_t capacity);

/**
 * Euclidean distance over all channels.
 */
enum S2scatStatus s2scat_scattering_distance(const struct S2scatScattering *a,
                                             const struct S2scatScattering *b,
                                             double *distance);

/**
 * Writes a `.scat` file to the NUL-terminated UTF-8 `path`.
 */
enum S2scatStatus s2scat_scattering_save(const struct S2scatScattering *s, const char *path);

void s2scat_scattering_free(struct S2scatScattering *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* S2SCAT_H */
