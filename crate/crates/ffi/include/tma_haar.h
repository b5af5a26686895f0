#ifndef TMA_HAAR_H
#define TMA_HAAR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

/*
 Result code of every fallible call.
 */
typedef enum TmaStatus {
  TMA_STATUS_OK = 0,
  TMA_STATUS_NULL_POINTER = 1,
  TMA_STATUS_INVALID_ARGUMENT = 2,
  TMA_STATUS_DOMAIN = 3,
  TMA_STATUS_LENGTH_MISMATCH = 4,
  TMA_STATUS_PANIC = 5,
} TmaStatus;

/*
 Haar coefficients of one modulating waveform.
 */
typedef struct TmaCoefficients TmaCoefficients;

/*
 A waveform bound to an array and a steering direction.
 */
typedef struct TmaScene TmaScene;

typedef struct TmaComplex {
  double re;
  double im;
} TmaComplex;

typedef struct TmaEfficiency {
  double eta_tma;
  double eta_mod;
  double eta_total;
  double b_max_hz;
} TmaEfficiency;

/*
 Message of the last failed call on this thread; empty after a success.
 Valid until the next call into this library on the same thread.
 */
const char *tma_last_error(void);

/*
 Coefficients of `sin(2 pi t)` sampled at `m` cell midpoints.

 # Safety
 `out` must be valid for a pointer write.
 */
enum TmaStatus tma_coefficients_sine(size_t m, struct TmaCoefficients **out);

/*
 Coefficients of an arbitrary midpoint-sampled waveform of `len` values.

 # Safety
 `values` must point to `len` readable doubles; `out` must be valid for
 a pointer write.
 */
enum TmaStatus tma_coefficients_from_samples(const double *values,
                                             size_t len,
                                             struct TmaCoefficients **out);

/*
 Releases a coefficient handle; null is ignored.

 # Safety
 `coeffs` must come from this library and not be used afterwards.
 */
void tma_coefficients_free(struct TmaCoefficients *coeffs);

/*
 Number of samples `M` the coefficients describe.

 # Safety
 Pointers must be valid or null.
 */
enum TmaStatus tma_coefficients_count(const struct TmaCoefficients *coeffs, size_t *out);

/*
 Copies `[W0, W(0,1), W(1,1), W(1,2), ...]` into `out`, which must hold
 exactly `M` doubles.

 # Safety
 `out` must point to `len` writable doubles.
 */
enum TmaStatus tma_coefficients_vector(const struct TmaCoefficients *coeffs,
                                       double *out,
                                       size_t len);

/*
 Coefficients as a JSON document, written to `*out`.

 # Safety
 Pointers must be valid; free the string with `tma_string_free`.
 */
enum TmaStatus tma_coefficients_json(const struct TmaCoefficients *coeffs, char **out);

/*
 Harmonic `q` of the normalized single-sideband pulse.

 # Safety
 Pointers must be valid or null.
 */
enum TmaStatus tma_pulse_coefficient(const struct TmaCoefficients *coeffs,
                                     int64_t q,
                                     struct TmaComplex *out);

/*
 Strongest unwanted harmonic in `|q| <= 2M + 2`, dB below harmonic 1;
 `-INFINITY` when all are suppressed.

 # Safety
 Pointers must be valid or null.
 */
enum TmaStatus tma_peak_sideband_db(const struct TmaCoefficients *coeffs, double *out);

/*
 # Safety
 Pointers must be valid or null.
 */
enum TmaStatus tma_efficiencies(const struct TmaCoefficients *coeffs,
                                double f0_hz,
                                struct TmaEfficiency *out);

/*
 Binds a copy of `coeffs` to a linear array steered to `theta0_deg`.

 # Safety
 `coeffs` must be a valid handle and `out` valid for a pointer write.
 */
enum TmaStatus tma_scene_new(const struct TmaCoefficients *coeffs,
                             size_t elements,
                             double spacing_wavelengths,
                             double carrier_hz,
                             double theta0_deg,
                             double f0_hz,
                             struct TmaScene **out);

/*
 # Safety
 `scene` must come from this library and not be used afterwards.
 */
void tma_scene_free(struct TmaScene *scene);

/*
 Per-element switching delays in seconds; `len` must equal the element
 count.

 # Safety
 `out` must point to `len` writable doubles.
 */
enum TmaStatus tma_scene_delays(const struct TmaScene *scene, double *out, size_t len);

/*
 Array factor of harmonic `q` toward `theta_deg`.

 # Safety
 Pointers must be valid or null.
 */
enum TmaStatus tma_scene_array_factor(const struct TmaScene *scene,
                                      int64_t q,
                                      double theta_deg,
                                      struct TmaComplex *out);

/*
 Feeding-network plan and per-element switch timelines as JSON.

 # Safety
 Pointers must be valid; free the string with `tma_string_free`.
 */
enum TmaStatus tma_scene_schedule_json(const struct TmaScene *scene, char **out);

/*
 Releases a string returned by this library; null is ignored.

 # Safety
 `text` must come from this library and not be used afterwards.
 */
void tma_string_free(char *text);

#endif  /* TMA_HAAR_H */
