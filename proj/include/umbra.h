/* umbra — shadow detection, removal and evaluation for single color images.
 *
 * C API over the umbra core. All objects are opaque handles created and
 * destroyed through these functions; every fallible call returns a
 * umbra_status, with a thread-local human-readable message available from
 * umbra_last_error().
 */
#ifndef UMBRA_H
#define UMBRA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define UMBRA_API __declspec(dllexport)
#else
#define UMBRA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum umbra_status {
    UMBRA_OK = 0,
    UMBRA_ERR_FILE_NOT_FOUND = 1,
    UMBRA_ERR_UNSUPPORTED_FORMAT = 2,
    UMBRA_ERR_DECODE = 3,
    UMBRA_ERR_IO = 4,
    UMBRA_ERR_INVALID_ARGUMENT = 5,
    UMBRA_ERR_DIMENSION_MISMATCH = 6,
    UMBRA_ERR_IMAGE_TOO_SMALL = 7,
    UMBRA_ERR_DEGENERATE_INPUT = 8,
    UMBRA_ERR_MISSING_CLASS = 9,
    UMBRA_ERR_NO_IMAGES = 10,
    UMBRA_ERR_PARTIAL_FAILURE = 11,
    UMBRA_ERR_INTERNAL = 12,
} umbra_status;

typedef struct umbra_image umbra_image;
typedef struct umbra_config umbra_config;
typedef struct umbra_detection umbra_detection;
typedef struct umbra_report umbra_report;

/* Library version string, e.g. "1.0.0". */
UMBRA_API const char* umbra_version(void);

/* Message for the last failing call on this thread; empty string if none. */
UMBRA_API const char* umbra_last_error(void);

/* Short description of a status code. */
UMBRA_API const char* umbra_status_name(umbra_status status);

/* ---- images ---------------------------------------------------------- */

/* Decodes an 8-bit PNG or JPEG file to RGB. */
UMBRA_API umbra_status umbra_image_load(const char* path, umbra_image** out);

/* Wraps a caller buffer (copied) of w*h interleaved RGB bytes. */
UMBRA_API umbra_status umbra_image_from_rgb8(int width, int height, const uint8_t* rgb,
                                             umbra_image** out);

UMBRA_API void umbra_image_destroy(umbra_image* image);
UMBRA_API int umbra_image_width(const umbra_image* image);
UMBRA_API int umbra_image_height(const umbra_image* image);

/* Copies w*h*3 interleaved RGB bytes into the caller buffer. */
UMBRA_API umbra_status umbra_image_copy_rgb8(const umbra_image* image, uint8_t* buffer,
                                             size_t buffer_size);

UMBRA_API umbra_status umbra_image_save_png(const umbra_image* image, const char* path);
UMBRA_API umbra_status umbra_image_save_jpeg(const umbra_image* image, const char* path,
                                             int quality);

/* ---- configuration --------------------------------------------------- */

/* Creates a config holding the default parameters. */
UMBRA_API umbra_status umbra_config_create(umbra_config** out);
UMBRA_API void umbra_config_destroy(umbra_config* config);

/* Sets one key=value option. Keys: coarse_sigma, fine_sigma, iterations,
 * shadow_fraction, gray_limit (otsu | fixed | fixed:<level>),
 * max_dist_factor, color_scale, texton_k, seed, jobs, angle_max_deg,
 * ratio_min, texture_skip_ratio, emd_max, lum_bin_width,
 * lum_peak_prominence. */
UMBRA_API umbra_status umbra_config_set(umbra_config* config, const char* key,
                                        const char* value);

/* Loads key=value lines ('#' comments) from a file. */
UMBRA_API umbra_status umbra_config_load_file(umbra_config* config, const char* path);

/* Current value of a key, formatted as umbra_config_set accepts it. The
 * returned pointer stays valid until the next call on this thread. */
UMBRA_API umbra_status umbra_config_get(const umbra_config* config, const char* key,
                                        const char** out_value);

/* ---- detection and removal ------------------------------------------- */

/* Runs the full detection pipeline. */
UMBRA_API umbra_status umbra_detect(const umbra_image* image, const umbra_config* config,
                                    umbra_detection** out);

UMBRA_API void umbra_detection_destroy(umbra_detection* detection);
UMBRA_API int umbra_detection_width(const umbra_detection* detection);
UMBRA_API int umbra_detection_height(const umbra_detection* detection);

/* Number of pixels marked shadow. */
UMBRA_API size_t umbra_detection_shadow_pixels(const umbra_detection* detection);

/* Copies the mask (255 = shadow, 0 = non-shadow), one byte per pixel. */
UMBRA_API umbra_status umbra_detection_copy_mask(const umbra_detection* detection,
                                                 uint8_t* buffer, size_t buffer_size);

/* Writes the mask as an 8-bit single-channel PNG (255 = shadow). */
UMBRA_API umbra_status umbra_detection_save_mask_png(const umbra_detection* detection,
                                                     const char* path);

/* Writes the shadow/non-shadow link structure as a JSON sidecar. */
UMBRA_API umbra_status umbra_detection_save_links_json(const umbra_detection* detection,
                                                       const char* path);

/* Relights the detected shadow regions of the image the detection was run
 * on; returns a new image. */
UMBRA_API umbra_status umbra_detection_remove_shadows(const umbra_detection* detection,
                                                      const umbra_image* image,
                                                      umbra_image** out);

/* ---- debug segmentation ---------------------------------------------- */

/* Segments at the given kernel scale and paints each segment with its mean
 * color. sigma <= 0 uses the config's coarse sigma. */
UMBRA_API umbra_status umbra_segment_preview(const umbra_image* image,
                                             const umbra_config* config, double sigma,
                                             umbra_image** out);

/* Writes the texton label map as an indexed grayscale PNG. */
UMBRA_API umbra_status umbra_texton_map_png(const umbra_image* image,
                                            const umbra_config* config, const char* path);

/* ---- dataset evaluation ---------------------------------------------- */

/* Detects shadows for every image in images_dir, scores each against the
 * same-stem mask in truth_dir, and pools the counts. overrides is an
 * optional array of "<pattern>=<key>:<value>" strings applied per matching
 * file name. Returns UMBRA_OK even when individual images failed; check
 * umbra_report_all_ok. */
UMBRA_API umbra_status umbra_eval_run(const char* images_dir, const char* truth_dir,
                                      const umbra_config* config,
                                      const char* const* overrides, size_t override_count,
                                      umbra_report** out);

UMBRA_API void umbra_report_destroy(umbra_report* report);

/* Serialized report; pointer valid until the report is destroyed.
 * include_timings adds per-image wall-clock times (non-deterministic). */
UMBRA_API umbra_status umbra_report_json(umbra_report* report, int include_timings,
                                         const char** out_json);

UMBRA_API umbra_status umbra_report_save_json(umbra_report* report, int include_timings,
                                              const char* path);

/* Pooled balanced error rate; NaN when undefined. */
UMBRA_API double umbra_report_pooled_ber(const umbra_report* report);

/* 1 when every image was evaluated without errors. */
UMBRA_API int umbra_report_all_ok(const umbra_report* report);

#ifdef __cplusplus
}
#endif

#endif /* UMBRA_H */
