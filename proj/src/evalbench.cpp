#include "evalbench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <thread>

#include <nlohmann/json.hpp>

#include "configio.hpp"
#include "error.hpp"
#include "parallel.hpp"

namespace fs = std::filesystem;

namespace umbra {

ConfusionMatrix confusion(const ShadowMask& pred, const ShadowMask& truth) {
    if (pred.width != truth.width || pred.height != truth.height)
        raise(ErrorCode::dimension_mismatch, "confusion: mask dimensions differ");
    ConfusionMatrix cm;
    const std::size_t n = pred.mask.size();
    for (std::size_t i = 0; i < n; ++i) {
        const bool p = pred.mask[i] != 0;
        const bool t = truth.mask[i] != 0;
        if (p && t)
            ++cm.tp;
        else if (p && !t)
            ++cm.fp;
        else if (!p && t)
            ++cm.fn;
        else
            ++cm.tn;
    }
    return cm;
}

double shadow_accuracy(const ConfusionMatrix& cm) {
    if (cm.tp + cm.fn == 0)
        raise(ErrorCode::missing_class, "no shadow pixels in ground truth");
    return static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
}

double nonshadow_accuracy(const ConfusionMatrix& cm) {
    if (cm.tn + cm.fp == 0)
        raise(ErrorCode::missing_class, "no non-shadow pixels in ground truth");
    return static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
}

double ber(const ConfusionMatrix& cm) {
    return 1.0 - 0.5 * (shadow_accuracy(cm) + nonshadow_accuracy(cm));
}

bool pattern_match(const std::string& pattern, const std::string& name) {
    // Shell-style wildcards: '*' any run, '?' any single character.
    std::size_t p = 0, s = 0, star = std::string::npos, mark = 0;
    while (s < name.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[s])) {
            ++p;
            ++s;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = s;
        } else if (star != std::string::npos) {
            p = star + 1;
            s = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

bool EvalReport::all_ok() const {
    if (!skipped.empty()) return false;
    return std::all_of(per_image.begin(), per_image.end(),
                       [](const ImageScore& s) { return s.ok; });
}

namespace {

bool has_image_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

ShadowMask binarize_truth(const RasterImage& img) {
    const GrayImage gray = rgb_to_gray(img);
    ShadowMask mask(gray.width, gray.height);
    for (std::size_t i = 0; i < gray.pixels.size(); ++i)
        mask.mask[i] = gray.pixels[i] > 127 ? 1 : 0;
    return mask;
}

}  // namespace

EvalReport run_dataset(const std::string& images_dir, const std::string& truth_dir,
                       const DetectionConfig& cfg, const std::vector<ConfigOverride>& overrides) {
    if (!fs::is_directory(images_dir))
        raise(ErrorCode::file_not_found, "images directory not found: " + images_dir);
    if (!fs::is_directory(truth_dir))
        raise(ErrorCode::file_not_found, "truth directory not found: " + truth_dir);

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(images_dir))
        if (entry.is_regular_file() && has_image_extension(entry.path()))
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) raise(ErrorCode::no_images, "no images found in " + images_dir);

    EvalReport report;
    report.config_echo = echo_config(cfg);

    // Resolve ground-truth partners up front; missing masks are skipped.
    struct Job {
        fs::path image;
        fs::path truth;
    };
    std::vector<Job> jobs_list;
    for (const auto& f : files) {
        fs::path truth;
        for (const char* ext : {".png", ".jpg", ".jpeg"}) {
            fs::path candidate = fs::path(truth_dir) / (f.stem().string() + ext);
            if (fs::exists(candidate)) {
                truth = candidate;
                break;
            }
        }
        if (truth.empty())
            report.skipped.push_back(f.filename().string());
        else
            jobs_list.push_back({f, truth});
    }

    report.per_image.resize(jobs_list.size());
    const int pool = static_cast<int>(std::min<std::size_t>(
        resolve_jobs(cfg.jobs), std::max<std::size_t>(1, jobs_list.size())));
    DetectionConfig per_image_cfg = cfg;
    per_image_cfg.jobs = pool > 1 ? 1 : cfg.jobs;

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs_list.size()) break;
            const Job& job = jobs_list[i];
            ImageScore& score = report.per_image[i];
            score.file = job.image.filename().string();
            DetectionConfig local = per_image_cfg;
            for (const auto& o : overrides) {
                if (!pattern_match(o.pattern, score.file)) continue;
                apply_config_key(local, o.key, o.value);
                score.overridden = true;
            }
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const RasterImage img = load_image(job.image.string());
                const ShadowMask truth = binarize_truth(load_image(job.truth.string()));
                const DetectionResult det = detect_shadows(img, local);
                score.cm = confusion(det.mask, truth);
                try {
                    score.ber_value = ber(score.cm);
                } catch (const Error&) {
                    score.ber_value.reset();  // one class absent in truth
                }
                score.ok = true;
            } catch (const Error& e) {
                score.ok = false;
                score.error = e.what();
            }
            const auto t1 = std::chrono::steady_clock::now();
            score.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        }
    };
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    for (const auto& score : report.per_image) {
        if (score.overridden) ++report.overridden_count;
        if (score.ok) report.pooled += score.cm;
    }
    if (report.pooled.tp + report.pooled.fn > 0 && report.pooled.tn + report.pooled.fp > 0)
        report.pooled_ber = ber(report.pooled);
    return report;
}

std::string report_to_json(const EvalReport& report) {
    using nlohmann::json;
    json j;
    json echo = json::object();
    for (const auto& [k, v] : report.config_echo) echo[k] = v;
    j["config_echo"] = echo;

    json images = json::array();
    for (const auto& s : report.per_image) {
        json e;
        e["file"] = s.file;
        e["ok"] = s.ok;
        if (!s.ok) {
            e["error"] = s.error;
        } else {
            e["tp"] = s.cm.tp;
            e["fp"] = s.cm.fp;
            e["tn"] = s.cm.tn;
            e["fn"] = s.cm.fn;
            e["shadow_acc"] =
                s.cm.tp + s.cm.fn > 0 ? json(shadow_accuracy(s.cm)) : json(nullptr);
            e["nonshadow_acc"] =
                s.cm.tn + s.cm.fp > 0 ? json(nonshadow_accuracy(s.cm)) : json(nullptr);
            e["ber"] = s.ber_value ? json(*s.ber_value) : json(nullptr);
            if (s.overridden) e["overridden"] = true;
            if (report.include_timings) e["wall_ms"] = s.wall_ms;
        }
        images.push_back(std::move(e));
    }
    j["per_image"] = images;

    json pooled;
    pooled["tp"] = report.pooled.tp;
    pooled["fp"] = report.pooled.fp;
    pooled["tn"] = report.pooled.tn;
    pooled["fn"] = report.pooled.fn;
    pooled["shadow_acc"] = report.pooled.tp + report.pooled.fn > 0
                               ? json(shadow_accuracy(report.pooled))
                               : json(nullptr);
    pooled["nonshadow_acc"] = report.pooled.tn + report.pooled.fp > 0
                                  ? json(nonshadow_accuracy(report.pooled))
                                  : json(nullptr);
    pooled["ber"] = report.pooled_ber ? json(*report.pooled_ber) : json(nullptr);
    j["pooled"] = pooled;

    j["skipped"] = report.skipped;
    j["overridden_count"] = report.overridden_count;
    return j.dump(2) + "\n";
}

}  // namespace umbra
