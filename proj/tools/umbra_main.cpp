// Command-line front end for the umbra shared library. Talks to the core
// exclusively through the public C API in umbra.h.

#include <cctype>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "umbra.h"

namespace {

struct ConfigDeleter {
    void operator()(umbra_config* c) const { umbra_config_destroy(c); }
};
struct ImageDeleter {
    void operator()(umbra_image* i) const { umbra_image_destroy(i); }
};
struct DetectionDeleter {
    void operator()(umbra_detection* d) const { umbra_detection_destroy(d); }
};
struct ReportDeleter {
    void operator()(umbra_report* r) const { umbra_report_destroy(r); }
};

using ConfigPtr = std::unique_ptr<umbra_config, ConfigDeleter>;
using ImagePtr = std::unique_ptr<umbra_image, ImageDeleter>;
using DetectionPtr = std::unique_ptr<umbra_detection, DetectionDeleter>;
using ReportPtr = std::unique_ptr<umbra_report, ReportDeleter>;

int fail(const char* what) {
    std::fprintf(stderr, "umbra: %s: %s\n", what, umbra_last_error());
    return 1;
}

bool has_jpeg_extension(const std::string& path) {
    const auto dot = path.rfind('.');
    if (dot == std::string::npos) return false;
    std::string ext = path.substr(dot + 1);
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext == "jpg" || ext == "jpeg";
}

// One CLI flag per config key; values are passed through umbra_config_set so
// the CLI and config files share one grammar.
struct ConfigFlag {
    const char* key;
    const char* flag;
    const char* help;
    std::string value;
};

std::vector<ConfigFlag> make_config_flags() {
    return {
        {"coarse_sigma", "--coarse-sigma", "Quickshift kernel scale for the initial segmentation", {}},
        {"fine_sigma", "--fine-sigma", "Quickshift kernel scale for the refinement pass", {}},
        {"iterations", "--iterations", "Pairing rounds (round 1 is the initial neighbor pairing)", {}},
        {"shadow_fraction", "--shadow-fraction", "Refinement vote threshold (strict more-than)", {}},
        {"gray_limit", "--gray-limit", "Gray limit: otsu, fixed, or fixed:<level>", {}},
        {"max_dist_factor", "--max-dist-factor", "Quickshift max link distance as a multiple of sigma", {}},
        {"color_scale", "--color-scale", "Color weight in the quickshift feature space", {}},
        {"texton_k", "--texton-k", "Texton codebook size", {}},
        {"seed", "--seed", "Texton learning seed", {}},
        {"jobs", "--jobs", "Worker threads (0 = all cores)", {}},
        {"angle_max_deg", "--angle-max-deg", "Reflectance angle threshold in degrees", {}},
        {"ratio_min", "--ratio-min", "Minimum luminance ratio T (strict)", {}},
        {"texture_skip_ratio", "--texture-skip-ratio", "Skip the texture gate above this T", {}},
        {"emd_max", "--emd-max", "Normalized EMD threshold for the texture gate", {}},
        {"lum_bin_width", "--lum-bin-width", "Luminance histogram bin width (L units)", {}},
        {"lum_peak_prominence", "--lum-peak-prominence", "Peak height as a fraction of the tallest bin", {}},
    };
}

void add_config_options(CLI::App* cmd, std::vector<ConfigFlag>& flags, std::string& config_file) {
    cmd->add_option("--config", config_file, "Config file with key=value lines");
    for (auto& f : flags) cmd->add_option(f.flag, f.value, f.help);
}

// defaults < config file < inline flags
int build_config(const CLI::App* cmd, const std::vector<ConfigFlag>& flags,
                 const std::string& config_file, ConfigPtr& out) {
    umbra_config* raw = nullptr;
    if (umbra_config_create(&raw) != UMBRA_OK) return fail("config");
    out.reset(raw);
    if (!config_file.empty() && umbra_config_load_file(raw, config_file.c_str()) != UMBRA_OK)
        return fail("config");
    for (const auto& f : flags) {
        if (cmd->count(f.flag) == 0) continue;
        if (umbra_config_set(raw, f.key, f.value.c_str()) != UMBRA_OK) return fail("config");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shadow detection, removal and evaluation for single color images"};
    app.require_subcommand(1);

    std::string config_file;

    auto* detect_cmd = app.add_subcommand("detect", "Detect shadows and write the mask PNG");
    std::string detect_input, mask_out, links_out;
    detect_cmd->add_option("image", detect_input, "Input image (PNG or JPEG)")->required();
    detect_cmd->add_option("--mask-out", mask_out, "Output mask PNG (255 = shadow)")->required();
    detect_cmd->add_option("--links-out", links_out, "Optional JSON sidecar with the link structure");
    auto detect_flags = make_config_flags();
    add_config_options(detect_cmd, detect_flags, config_file);

    auto* remove_cmd = app.add_subcommand("remove", "Detect shadows and write the relit image");
    std::string remove_input, remove_out, remove_mask_out;
    int jpeg_quality = 92;
    remove_cmd->add_option("image", remove_input, "Input image (PNG or JPEG)")->required();
    remove_cmd->add_option("--out", remove_out,
                           "Output image, PNG by default (.jpg/.jpeg writes JPEG)")
        ->required();
    remove_cmd->add_option("--mask-out", remove_mask_out, "Also write the detection mask PNG");
    remove_cmd->add_option("--jpeg-quality", jpeg_quality, "JPEG quality when writing .jpg");
    auto remove_flags = make_config_flags();
    add_config_options(remove_cmd, remove_flags, config_file);

    auto* eval_cmd = app.add_subcommand("eval", "Score detection against ground-truth masks");
    std::string images_dir, truth_dir, report_out;
    std::vector<std::string> override_args;
    bool timings = false;
    eval_cmd->add_option("--images", images_dir, "Directory of input images")->required();
    eval_cmd->add_option("--truth", truth_dir, "Directory of ground-truth masks (same stems)")->required();
    eval_cmd->add_option("--report", report_out, "Write the JSON report here (default: stdout)");
    eval_cmd->add_option("--override", override_args,
                         "Per-file config delta, <pattern>=<key>:<value> (repeatable)");
    eval_cmd->add_flag("--timings", timings, "Include per-image wall times in the report");
    auto eval_flags = make_config_flags();
    add_config_options(eval_cmd, eval_flags, config_file);

    auto* segment_cmd = app.add_subcommand("segment", "Write a mean-color segmentation preview");
    std::string segment_input, segment_out, texton_out;
    double segment_sigma = 0.0;
    segment_cmd->add_option("image", segment_input, "Input image (PNG or JPEG)")->required();
    segment_cmd->add_option("--sigma", segment_sigma, "Kernel scale (default: coarse sigma)");
    segment_cmd->add_option("--out", segment_out, "Output PNG")->required();
    segment_cmd->add_option("--texton-out", texton_out,
                            "Also dump the texton label map as an indexed PNG");
    auto segment_flags = make_config_flags();
    add_config_options(segment_cmd, segment_flags, config_file);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (detect_cmd->parsed()) {
        ConfigPtr cfg;
        if (int rc = build_config(detect_cmd, detect_flags, config_file, cfg)) return rc;
        umbra_image* img = nullptr;
        if (umbra_image_load(detect_input.c_str(), &img) != UMBRA_OK) return fail(detect_input.c_str());
        ImagePtr image(img);
        umbra_detection* det = nullptr;
        if (umbra_detect(img, cfg.get(), &det) != UMBRA_OK) return fail(detect_input.c_str());
        DetectionPtr detection(det);
        if (umbra_detection_save_mask_png(det, mask_out.c_str()) != UMBRA_OK)
            return fail(mask_out.c_str());
        if (!links_out.empty() &&
            umbra_detection_save_links_json(det, links_out.c_str()) != UMBRA_OK)
            return fail(links_out.c_str());
        return 0;
    }

    if (remove_cmd->parsed()) {
        ConfigPtr cfg;
        if (int rc = build_config(remove_cmd, remove_flags, config_file, cfg)) return rc;
        umbra_image* img = nullptr;
        if (umbra_image_load(remove_input.c_str(), &img) != UMBRA_OK) return fail(remove_input.c_str());
        ImagePtr image(img);
        umbra_detection* det = nullptr;
        if (umbra_detect(img, cfg.get(), &det) != UMBRA_OK) return fail(remove_input.c_str());
        DetectionPtr detection(det);
        if (!remove_mask_out.empty() &&
            umbra_detection_save_mask_png(det, remove_mask_out.c_str()) != UMBRA_OK)
            return fail(remove_mask_out.c_str());
        umbra_image* relit = nullptr;
        if (umbra_detection_remove_shadows(det, img, &relit) != UMBRA_OK)
            return fail(remove_input.c_str());
        ImagePtr relit_owner(relit);
        const umbra_status saved =
            has_jpeg_extension(remove_out)
                ? umbra_image_save_jpeg(relit, remove_out.c_str(), jpeg_quality)
                : umbra_image_save_png(relit, remove_out.c_str());
        if (saved != UMBRA_OK) return fail(remove_out.c_str());
        return 0;
    }

    if (eval_cmd->parsed()) {
        ConfigPtr cfg;
        if (int rc = build_config(eval_cmd, eval_flags, config_file, cfg)) return rc;
        std::vector<const char*> overrides;
        overrides.reserve(override_args.size());
        for (const auto& o : override_args) overrides.push_back(o.c_str());
        umbra_report* rep = nullptr;
        if (umbra_eval_run(images_dir.c_str(), truth_dir.c_str(), cfg.get(), overrides.data(),
                           overrides.size(), &rep) != UMBRA_OK)
            return fail("eval");
        ReportPtr report(rep);
        if (!report_out.empty()) {
            if (umbra_report_save_json(rep, timings ? 1 : 0, report_out.c_str()) != UMBRA_OK)
                return fail(report_out.c_str());
        } else {
            const char* json = nullptr;
            if (umbra_report_json(rep, timings ? 1 : 0, &json) != UMBRA_OK) return fail("eval");
            std::fputs(json, stdout);
        }
        if (!umbra_report_all_ok(rep)) {
            std::fprintf(stderr, "umbra: some images could not be evaluated (see report)\n");
            return 1;
        }
        return 0;
    }

    if (segment_cmd->parsed()) {
        ConfigPtr cfg;
        if (int rc = build_config(segment_cmd, segment_flags, config_file, cfg)) return rc;
        umbra_image* img = nullptr;
        if (umbra_image_load(segment_input.c_str(), &img) != UMBRA_OK)
            return fail(segment_input.c_str());
        ImagePtr image(img);
        umbra_image* preview = nullptr;
        if (umbra_segment_preview(img, cfg.get(), segment_sigma, &preview) != UMBRA_OK)
            return fail(segment_input.c_str());
        ImagePtr preview_owner(preview);
        if (umbra_image_save_png(preview, segment_out.c_str()) != UMBRA_OK)
            return fail(segment_out.c_str());
        if (!texton_out.empty() &&
            umbra_texton_map_png(img, cfg.get(), texton_out.c_str()) != UMBRA_OK)
            return fail(texton_out.c_str());
        return 0;
    }

    return 2;
}
