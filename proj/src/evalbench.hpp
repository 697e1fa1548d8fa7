#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "detect.hpp"

namespace umbra {

struct ConfusionMatrix {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }
};

// Pixel counts with shadow as the positive class.
ConfusionMatrix confusion(const ShadowMask& pred, const ShadowMask& truth);

// Balanced error rate, 1 - (shadow recall + non-shadow recall) / 2.
// Throws missing_class when either class has no ground-truth pixels.
double ber(const ConfusionMatrix& cm);

double shadow_accuracy(const ConfusionMatrix& cm);     // tp / (tp + fn)
double nonshadow_accuracy(const ConfusionMatrix& cm);  // tn / (tn + fp)

struct ImageScore {
    std::string file;
    bool ok = false;
    std::string error;  // set when !ok
    ConfusionMatrix cm;
    std::optional<double> ber_value;  // absent when a class is missing
    double wall_ms = 0.0;
    bool overridden = false;
};

struct EvalReport {
    std::vector<ImageScore> per_image;  // sorted by filename
    ConfusionMatrix pooled;
    std::optional<double> pooled_ber;
    std::vector<std::string> skipped;  // images without a ground-truth mask
    int overridden_count = 0;
    bool include_timings = false;
    std::vector<std::pair<std::string, std::string>> config_echo;

    bool all_ok() const;
};

// A filename-pattern keyed config delta, e.g. "oirds_*=gray_limit:fixed:89".
struct ConfigOverride {
    std::string pattern;  // shell-style wildcard over the file name
    std::string key;
    std::string value;
};

// Runs detection over every image in images_dir (png/jpg/jpeg, sorted by
// name), scores each against the same-stem mask in truth_dir (binarized at
// >127), and pools the pixel counts. Missing masks skip the image with a
// warning entry. Images are processed in parallel (cfg.jobs capped).
EvalReport run_dataset(const std::string& images_dir, const std::string& truth_dir,
                       const DetectionConfig& cfg, const std::vector<ConfigOverride>& overrides);

std::string report_to_json(const EvalReport& report);

bool pattern_match(const std::string& pattern, const std::string& name);

}  // namespace umbra
