#ifndef POLAR_STAIRCASE_H
#define POLAR_STAIRCASE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by fallible calls.
typedef enum PscStatus {
  PSC_STATUS_OK = 0,
  PSC_STATUS_NULL_POINTER = 1,
  PSC_STATUS_INVALID_UTF8 = 2,
  PSC_STATUS_INVALID_CONFIG = 3,
  PSC_STATUS_LENGTH_MISMATCH = 4,
  PSC_STATUS_INVALID_STATE = 5,
  PSC_STATUS_EMPTY_WINDOW = 6,
  PSC_STATUS_IO = 7,
  PSC_STATUS_PANIC = 8,
} PscStatus;

// Seeded BPSK/AWGN channel.
typedef struct PscChannel PscChannel;

// Resolved simulation configuration.
typedef struct PscConfig PscConfig;

// Staircase encoder bound to one configuration and Eb/N0 design point.
typedef struct PscEncoder PscEncoder;

// Sliding-window staircase decoder.
typedef struct PscWindow PscWindow;

// Totals of one simulated Eb/N0 point.
typedef struct PscPointResult {
  double ebn0_db;
  uint64_t bits;
  uint64_t bit_errors;
  uint64_t frames;
  uint64_t frame_errors;
  uint64_t decodes_performed;
  uint64_t decodes_possible;
  double ber;
  double fer;
  double decoded_fraction;
  double wall_s;
} PscPointResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if the last call
// succeeded. The pointer stays valid until the next call on this thread.
const char *psc_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *psc_version(void);

// Parse a TOML configuration. Missing keys take their defaults; an empty
// string is the default configuration.
//
// # Safety
// `toml` must be a NUL-terminated string and `out` a writable pointer.
enum PscStatus psc_config_from_toml(const char *toml, struct PscConfig **out);

// # Safety
// `cfg` must be null or a handle from [`psc_config_from_toml`] not yet freed.
void psc_config_free(struct PscConfig *cfg);

// SHA-256 of the resolved configuration as 64 hex characters plus NUL.
// Release with [`psc_string_free`].
//
// # Safety
// `cfg` must be a live configuration handle.
char *psc_config_hash(const struct PscConfig *cfg);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void psc_string_free(char *s);

// Half the component length, which is the side of every frame matrix.
//
// # Safety
// `cfg` must be null or a live configuration handle.
size_t psc_config_half(const struct PscConfig *cfg);

// Simulate one Eb/N0 point with the configured stop rule.
//
// # Safety
// `cfg` must be a live configuration handle and `out` writable.
enum PscStatus psc_run_point(const struct PscConfig *cfg,
                             double ebn0_db,
                             size_t point_index,
                             struct PscPointResult *out);

// Create an encoder for the code constructed at `ebn0_db`.
//
// # Safety
// `cfg` must be a live configuration handle and `out` writable.
enum PscStatus psc_encoder_new(const struct PscConfig *cfg,
                               double ebn0_db,
                               struct PscEncoder **out);

// # Safety
// `enc` must be null or a live encoder handle.
void psc_encoder_free(struct PscEncoder *enc);

// New information bits per frame, `N/2` rows of payload bits.
//
// # Safety
// `enc` must be null or a live encoder handle.
size_t psc_encoder_bits_per_frame(const struct PscEncoder *enc);

// Encode one frame. `bits` holds `psc_encoder_bits_per_frame` bits, one per
// byte, row-major by codeword; `out` receives `(N/2)^2` code bits.
//
// # Safety
// `enc` must be a live encoder; the buffers must hold the stated lengths.
enum PscStatus psc_encoder_encode(struct PscEncoder *enc,
                                  const uint8_t *bits,
                                  size_t bits_len,
                                  uint8_t *out,
                                  size_t out_len);

// Create a decoding window for the code constructed at `ebn0_db`.
//
// # Safety
// `cfg` must be a live configuration handle and `out` writable.
enum PscStatus psc_window_new(const struct PscConfig *cfg, double ebn0_db, struct PscWindow **out);

// # Safety
// `win` must be null or a live window handle.
void psc_window_free(struct PscWindow *win);

// Frames currently held.
//
// # Safety
// `win` must be null or a live window handle.
size_t psc_window_len(const struct PscWindow *win);

// Install the known all-zero first frame in place of a received one.
//
// # Safety
// `win` must be a live window handle.
enum PscStatus psc_window_push_genesis(struct PscWindow *win);

// Install `(N/2)^2` channel LLRs. When the window was full the oldest
// frame is evicted, its bits written to `evicted` and `*evicted_written`
// set to 1; otherwise `*evicted_written` is 0 and `evicted` is untouched.
//
// # Safety
// `win` must be a live window; the buffers must hold the stated lengths and
// `evicted_written` must be writable.
enum PscStatus psc_window_push(struct PscWindow *win,
                               const double *llr,
                               size_t llr_len,
                               uint8_t *evicted,
                               size_t evicted_len,
                               int32_t *evicted_written);

// Run one decoding iteration over the window.
//
// # Safety
// `win` must be a live window handle.
enum PscStatus psc_window_decode(struct PscWindow *win);

// Evict the oldest frame and write its new-bit estimates.
//
// # Safety
// `win` must be a live window; `out` must hold `out_len` bytes.
enum PscStatus psc_window_pop(struct PscWindow *win, uint8_t *out, size_t out_len);

// Fraction of component decodes actually performed so far.
//
// # Safety
// `win` must be null or a live window handle.
double psc_window_decoded_fraction(const struct PscWindow *win);

// Create a seeded BPSK/AWGN channel at `ebn0_db` for code rate `rate`.
//
// # Safety
// `out` must be writable.
enum PscStatus psc_channel_new(double ebn0_db, double rate, uint64_t seed, struct PscChannel **out);

// # Safety
// `ch` must be null or a live channel handle.
void psc_channel_free(struct PscChannel *ch);

// Transmit `len` bits and write their channel LLRs.
//
// # Safety
// `ch` must be a live channel; both buffers must hold `len` elements.
enum PscStatus psc_channel_transmit(struct PscChannel *ch,
                                    const uint8_t *bits,
                                    double *llr,
                                    size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLAR_STAIRCASE_H */
