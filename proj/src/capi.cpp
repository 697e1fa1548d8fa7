#include "umbra.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "configio.hpp"
#include "detect.hpp"
#include "error.hpp"
#include "evalbench.hpp"
#include "quickshift.hpp"
#include "raster.hpp"
#include "relight.hpp"
#include "texture.hpp"

using namespace umbra;

struct umbra_image {
    RasterImage image;
};

struct umbra_config {
    DetectionConfig config;
};

struct umbra_detection {
    DetectionResult result;
};

struct umbra_report {
    EvalReport report;
    std::string json_cache;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_value_buffer;

umbra_status to_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::ok: return UMBRA_OK;
        case ErrorCode::file_not_found: return UMBRA_ERR_FILE_NOT_FOUND;
        case ErrorCode::unsupported_format: return UMBRA_ERR_UNSUPPORTED_FORMAT;
        case ErrorCode::decode_error: return UMBRA_ERR_DECODE;
        case ErrorCode::io_error: return UMBRA_ERR_IO;
        case ErrorCode::invalid_argument: return UMBRA_ERR_INVALID_ARGUMENT;
        case ErrorCode::dimension_mismatch: return UMBRA_ERR_DIMENSION_MISMATCH;
        case ErrorCode::image_too_small: return UMBRA_ERR_IMAGE_TOO_SMALL;
        case ErrorCode::degenerate_input: return UMBRA_ERR_DEGENERATE_INPUT;
        case ErrorCode::missing_class: return UMBRA_ERR_MISSING_CLASS;
        case ErrorCode::no_images: return UMBRA_ERR_NO_IMAGES;
        case ErrorCode::partial_failure: return UMBRA_ERR_PARTIAL_FAILURE;
        case ErrorCode::internal: return UMBRA_ERR_INTERNAL;
    }
    return UMBRA_ERR_INTERNAL;
}

template <typename Fn>
umbra_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return UMBRA_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return UMBRA_ERR_INTERNAL;
    }
}

umbra_status bad_argument(const char* message) {
    g_last_error = message;
    return UMBRA_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* umbra_version(void) { return "1.0.0"; }

const char* umbra_last_error(void) { return g_last_error.c_str(); }

const char* umbra_status_name(umbra_status status) {
    switch (status) {
        case UMBRA_OK: return "ok";
        case UMBRA_ERR_FILE_NOT_FOUND: return "file not found";
        case UMBRA_ERR_UNSUPPORTED_FORMAT: return "unsupported format";
        case UMBRA_ERR_DECODE: return "decode error";
        case UMBRA_ERR_IO: return "i/o error";
        case UMBRA_ERR_INVALID_ARGUMENT: return "invalid argument";
        case UMBRA_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
        case UMBRA_ERR_IMAGE_TOO_SMALL: return "image too small";
        case UMBRA_ERR_DEGENERATE_INPUT: return "degenerate input";
        case UMBRA_ERR_MISSING_CLASS: return "missing class";
        case UMBRA_ERR_NO_IMAGES: return "no images";
        case UMBRA_ERR_PARTIAL_FAILURE: return "partial failure";
        case UMBRA_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

umbra_status umbra_image_load(const char* path, umbra_image** out) {
    if (!path || !out) return bad_argument("umbra_image_load: null argument");
    *out = nullptr;
    return guarded([&] { *out = new umbra_image{load_image(path)}; });
}

umbra_status umbra_image_from_rgb8(int width, int height, const uint8_t* rgb,
                                   umbra_image** out) {
    if (!rgb || !out) return bad_argument("umbra_image_from_rgb8: null argument");
    if (width < 1 || height < 1) return bad_argument("umbra_image_from_rgb8: empty dimensions");
    *out = nullptr;
    return guarded([&] {
        RasterImage img(width, height);
        std::memcpy(img.pixels.data(), rgb, img.pixels.size());
        *out = new umbra_image{std::move(img)};
    });
}

void umbra_image_destroy(umbra_image* image) { delete image; }

int umbra_image_width(const umbra_image* image) { return image ? image->image.width : 0; }

int umbra_image_height(const umbra_image* image) { return image ? image->image.height : 0; }

umbra_status umbra_image_copy_rgb8(const umbra_image* image, uint8_t* buffer,
                                   size_t buffer_size) {
    if (!image || !buffer) return bad_argument("umbra_image_copy_rgb8: null argument");
    if (buffer_size < image->image.pixels.size())
        return bad_argument("umbra_image_copy_rgb8: buffer too small");
    std::memcpy(buffer, image->image.pixels.data(), image->image.pixels.size());
    g_last_error.clear();
    return UMBRA_OK;
}

umbra_status umbra_image_save_png(const umbra_image* image, const char* path) {
    if (!image || !path) return bad_argument("umbra_image_save_png: null argument");
    return guarded([&] { save_png(image->image, path); });
}

umbra_status umbra_image_save_jpeg(const umbra_image* image, const char* path, int quality) {
    if (!image || !path) return bad_argument("umbra_image_save_jpeg: null argument");
    if (quality < 1 || quality > 100)
        return bad_argument("umbra_image_save_jpeg: quality must be in [1, 100]");
    return guarded([&] { save_jpeg(image->image, path, quality); });
}

umbra_status umbra_config_create(umbra_config** out) {
    if (!out) return bad_argument("umbra_config_create: null argument");
    *out = new umbra_config{};
    g_last_error.clear();
    return UMBRA_OK;
}

void umbra_config_destroy(umbra_config* config) { delete config; }

umbra_status umbra_config_set(umbra_config* config, const char* key, const char* value) {
    if (!config || !key || !value) return bad_argument("umbra_config_set: null argument");
    return guarded([&] { apply_config_key(config->config, key, value); });
}

umbra_status umbra_config_load_file(umbra_config* config, const char* path) {
    if (!config || !path) return bad_argument("umbra_config_load_file: null argument");
    return guarded([&] { load_config_file(config->config, path); });
}

umbra_status umbra_config_get(const umbra_config* config, const char* key,
                              const char** out_value) {
    if (!config || !key || !out_value) return bad_argument("umbra_config_get: null argument");
    return guarded([&] {
        if (std::string(key) == "jobs") {  // accepted but never echoed
            g_value_buffer = std::to_string(config->config.jobs);
            *out_value = g_value_buffer.c_str();
            return;
        }
        for (const auto& [k, v] : echo_config(config->config)) {
            if (k == key) {
                g_value_buffer = v;
                *out_value = g_value_buffer.c_str();
                return;
            }
        }
        raise(ErrorCode::invalid_argument, std::string("config: unknown key: ") + key);
    });
}

umbra_status umbra_detect(const umbra_image* image, const umbra_config* config,
                          umbra_detection** out) {
    if (!image || !config || !out) return bad_argument("umbra_detect: null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new umbra_detection{detect_shadows(image->image, config->config)};
    });
}

void umbra_detection_destroy(umbra_detection* detection) { delete detection; }

int umbra_detection_width(const umbra_detection* detection) {
    return detection ? detection->result.mask.width : 0;
}

int umbra_detection_height(const umbra_detection* detection) {
    return detection ? detection->result.mask.height : 0;
}

size_t umbra_detection_shadow_pixels(const umbra_detection* detection) {
    return detection ? detection->result.mask.count() : 0;
}

umbra_status umbra_detection_copy_mask(const umbra_detection* detection, uint8_t* buffer,
                                       size_t buffer_size) {
    if (!detection || !buffer) return bad_argument("umbra_detection_copy_mask: null argument");
    const auto& mask = detection->result.mask.mask;
    if (buffer_size < mask.size())
        return bad_argument("umbra_detection_copy_mask: buffer too small");
    for (std::size_t i = 0; i < mask.size(); ++i) buffer[i] = mask[i] ? 255 : 0;
    g_last_error.clear();
    return UMBRA_OK;
}

umbra_status umbra_detection_save_mask_png(const umbra_detection* detection, const char* path) {
    if (!detection || !path)
        return bad_argument("umbra_detection_save_mask_png: null argument");
    return guarded([&] { save_gray_png(mask_to_gray(detection->result.mask), path); });
}

umbra_status umbra_detection_save_links_json(const umbra_detection* detection,
                                             const char* path) {
    if (!detection || !path)
        return bad_argument("umbra_detection_save_links_json: null argument");
    return guarded([&] {
        using nlohmann::json;
        const DetectionResult& r = detection->result;
        json j;
        j["segment_count"] = r.coarse_seg.segment_count;
        j["fine_segment_count"] = r.fine_segment_count;
        j["gray_limit"] = r.gray_limit;
        json links = json::array();
        for (const auto& [s, n] : r.links.links)
            links.push_back({{"shadow", s}, {"nonshadow", n}});
        j["links"] = links;
        j["shadow_segments"] = std::vector<int>(r.links.shadow_set.begin(),
                                                r.links.shadow_set.end());
        j["nonshadow_segments"] = std::vector<int>(r.links.nonshadow_set.begin(),
                                                   r.links.nonshadow_set.end());
        json segs = json::array();
        for (const auto& st : r.stats) {
            json e;
            e["id"] = st.id;
            e["pixels"] = st.pixel_count;
            e["median_rgb"] = st.median_rgb;
            e["median_l"] = st.median_l;
            e["luminance_region"] = st.luminance_region;
            segs.push_back(std::move(e));
        }
        j["segments"] = segs;
        std::ofstream out(path);
        if (!out) raise(ErrorCode::io_error, std::string("cannot write ") + path);
        out << j.dump(2) << "\n";
        if (!out) raise(ErrorCode::io_error, std::string("write failed: ") + path);
    });
}

umbra_status umbra_detection_remove_shadows(const umbra_detection* detection,
                                            const umbra_image* image, umbra_image** out) {
    if (!detection || !image || !out)
        return bad_argument("umbra_detection_remove_shadows: null argument");
    *out = nullptr;
    return guarded([&] {
        const DetectionResult& r = detection->result;
        RasterImage relit;
        if (r.links.links.empty()) {
            relit = image->image;  // nothing detected, image passes through
        } else {
            const RelightCoefficients coeffs = relight_coefficients(r.links, r.stats);
            relit = remove_shadows(image->image, r.mask, r.coarse_seg, coeffs);
        }
        *out = new umbra_image{std::move(relit)};
    });
}

umbra_status umbra_segment_preview(const umbra_image* image, const umbra_config* config,
                                   double sigma, umbra_image** out) {
    if (!image || !config || !out) return bad_argument("umbra_segment_preview: null argument");
    *out = nullptr;
    return guarded([&] {
        const DetectionConfig& cfg = config->config;
        const double s = sigma > 0.0 ? sigma : cfg.coarse_sigma;
        const QuickshiftParams params =
            QuickshiftParams::for_sigma(s, cfg.max_dist_factor, cfg.color_scale);
        const SegmentMap seg = quickshift_segment(image->image, params, cfg.jobs);
        *out = new umbra_image{segment_mean_color_image(image->image, seg)};
    });
}

umbra_status umbra_texton_map_png(const umbra_image* image, const umbra_config* config,
                                  const char* path) {
    if (!image || !config || !path) return bad_argument("umbra_texton_map_png: null argument");
    return guarded([&] {
        const DetectionConfig& cfg = config->config;
        const GrayImage gray = rgb_to_gray(image->image);
        const ResponseGrid responses = contrast_normalize(
            filter_responses(gray, FilterBank::make_default(), cfg.jobs), 7.65, cfg.jobs);
        const TextonCodebook book =
            learn_textons(responses, cfg.texton_k, cfg.texton_seed, cfg.jobs);
        save_gray_png(texton_label_image(responses, book), path);
    });
}

umbra_status umbra_eval_run(const char* images_dir, const char* truth_dir,
                            const umbra_config* config, const char* const* overrides,
                            size_t override_count, umbra_report** out) {
    if (!images_dir || !truth_dir || !config || !out)
        return bad_argument("umbra_eval_run: null argument");
    if (override_count > 0 && !overrides)
        return bad_argument("umbra_eval_run: null overrides array");
    *out = nullptr;
    return guarded([&] {
        std::vector<ConfigOverride> parsed;
        parsed.reserve(override_count);
        for (size_t i = 0; i < override_count; ++i) {
            if (!overrides[i])
                raise(ErrorCode::invalid_argument, "umbra_eval_run: null override entry");
            parsed.push_back(parse_override(overrides[i]));
        }
        *out = new umbra_report{run_dataset(images_dir, truth_dir, config->config, parsed), {}};
    });
}

void umbra_report_destroy(umbra_report* report) { delete report; }

umbra_status umbra_report_json(umbra_report* report, int include_timings,
                               const char** out_json) {
    if (!report || !out_json) return bad_argument("umbra_report_json: null argument");
    return guarded([&] {
        report->report.include_timings = include_timings != 0;
        report->json_cache = report_to_json(report->report);
        *out_json = report->json_cache.c_str();
    });
}

umbra_status umbra_report_save_json(umbra_report* report, int include_timings,
                                    const char* path) {
    if (!report || !path) return bad_argument("umbra_report_save_json: null argument");
    return guarded([&] {
        report->report.include_timings = include_timings != 0;
        std::ofstream out(path);
        if (!out) raise(ErrorCode::io_error, std::string("cannot write ") + path);
        out << report_to_json(report->report);
        if (!out) raise(ErrorCode::io_error, std::string("write failed: ") + path);
    });
}

double umbra_report_pooled_ber(const umbra_report* report) {
    if (!report || !report->report.pooled_ber) return std::nan("");
    return *report->report.pooled_ber;
}

int umbra_report_all_ok(const umbra_report* report) {
    return report && report->report.all_ok() ? 1 : 0;
}

}  // extern "C"
