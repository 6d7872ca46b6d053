#ifndef LIDOMAUG_H
#define LIDOMAUG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum LdmStatus {
  LDM_STATUS_OK = 0,
  LDM_STATUS_NULL_ARGUMENT = 1,
  LDM_STATUS_INVALID_UTF8 = 2,
  LDM_STATUS_INVALID_INPUT = 3,
  LDM_STATUS_UNKNOWN_PRESET = 4,
  LDM_STATUS_PARSE = 5,
  LDM_STATUS_FORMAT = 6,
  LDM_STATUS_CACHE_VERSION = 7,
  LDM_STATUS_IO = 8,
  LDM_STATUS_PANIC = 9,
} LdmStatus;

/**
 * Output of one augmentation.
 */
typedef struct LdmAugmented LdmAugmented;

/**
 * A world model loaded from a cache file.
 */
typedef struct LdmWorld LdmWorld;

/**
 * Cylindrical sensor description; angles in radians.
 */
typedef struct LdmSensor {
  uint32_t channels;
  uint32_t width;
  double f_up;
  double f_down;
  double max_range;
  double spin_hz;
} LdmSensor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ldm_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ldm_version(void);

/**
 * Number of built-in sensor presets.
 */
size_t ldm_preset_count(void);

/**
 * Static name of preset `index`, or null when out of range.
 */
const char *ldm_preset_name(size_t index);

/**
 * Looks up a preset by name (case-insensitive).
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` writable.
 */
enum LdmStatus ldm_preset(const char *name, struct LdmSensor *out);

/**
 * Opens a world cache file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum LdmStatus ldm_world_open(const char *path, struct LdmWorld **out);

/**
 * Point count of a world; 0 for null.
 *
 * # Safety
 * `world` must be null or a live handle.
 */
size_t ldm_world_len(const struct LdmWorld *world);

/**
 * # Safety
 * `world` must be null or a handle not yet freed and not in use.
 */
void ldm_world_free(struct LdmWorld *world);

/**
 * Runs one augmentation.
 *
 * `spec` is a spec document in the `key = value` grammar, or null for
 * the defaults; `seed` replaces any seed it contains. When fewer than
 * `n_mix` worlds are given they are reused in turn.
 *
 * # Safety
 * `worlds` must point to `n_worlds` live handles, `spec` must be null or
 * a NUL-terminated string, and `out` writable.
 */
enum LdmStatus ldm_augment(const struct LdmWorld *const *worlds,
                           size_t n_worlds,
                           const char *spec,
                           uint64_t seed,
                           struct LdmAugmented **out);

/**
 * Number of output points N.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t ldm_augmented_len(const struct LdmAugmented *r);

/**
 * Row-major N×4 array `x, y, z, intensity`, owned by the handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
const float *ldm_augmented_points(const struct LdmAugmented *r);

/**
 * N class ids, owned by the handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
const uint16_t *ldm_augmented_labels(const struct LdmAugmented *r);

/**
 * Row-major H×W range image in meters, 0 for empty pixels.
 *
 * # Safety
 * `r` must be null or a live handle; `height` and `width` may be null.
 */
const float *ldm_augmented_range(const struct LdmAugmented *r, uint32_t *height, uint32_t *width);

/**
 * Seed the result was generated with.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
uint64_t ldm_augmented_seed(const struct LdmAugmented *r);

/**
 * # Safety
 * `r` must be null or a handle not yet freed.
 */
void ldm_augmented_free(struct LdmAugmented *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LIDOMAUG_H */
