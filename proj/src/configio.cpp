#include "configio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "evalbench.hpp"

namespace umbra {

namespace {

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        raise(ErrorCode::invalid_argument, "config: bad numeric value for " + key + ": " + value);
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        raise(ErrorCode::invalid_argument, "config: bad integer value for " + key + ": " + value);
    }
}

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

}  // namespace

void apply_config_key(DetectionConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "coarse_sigma") {
        cfg.coarse_sigma = parse_double(key, value);
    } else if (key == "fine_sigma") {
        cfg.fine_sigma = parse_double(key, value);
    } else if (key == "iterations") {
        cfg.iterations = static_cast<int>(parse_int(key, value));
    } else if (key == "shadow_fraction") {
        cfg.shadow_fraction = parse_double(key, value);
    } else if (key == "gray_limit") {
        if (value == "otsu") {
            cfg.gray_limit_mode = GrayLimitMode::otsu;
        } else if (value == "fixed") {
            cfg.gray_limit_mode = GrayLimitMode::fixed;
        } else if (value.rfind("fixed:", 0) == 0) {
            cfg.gray_limit_mode = GrayLimitMode::fixed;
            cfg.gray_limit_fixed = static_cast<int>(parse_int(key, value.substr(6)));
        } else {
            raise(ErrorCode::invalid_argument,
                  "config: gray_limit must be 'otsu', 'fixed' or 'fixed:<level>', got " + value);
        }
    } else if (key == "max_dist_factor") {
        cfg.max_dist_factor = parse_double(key, value);
    } else if (key == "color_scale") {
        cfg.color_scale = parse_double(key, value);
    } else if (key == "texton_k") {
        cfg.texton_k = static_cast<int>(parse_int(key, value));
    } else if (key == "seed") {
        cfg.texton_seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "jobs") {
        cfg.jobs = static_cast<int>(parse_int(key, value));
    } else if (key == "angle_max_deg") {
        cfg.classifier.angle_max_deg = parse_double(key, value);
    } else if (key == "ratio_min") {
        cfg.classifier.ratio_min = parse_double(key, value);
    } else if (key == "texture_skip_ratio") {
        cfg.classifier.texture_skip_ratio = parse_double(key, value);
    } else if (key == "emd_max") {
        cfg.classifier.emd_max = parse_double(key, value);
    } else if (key == "lum_bin_width") {
        cfg.classifier.lum_bin_width = parse_double(key, value);
    } else if (key == "lum_peak_prominence") {
        cfg.classifier.lum_peak_prominence = parse_double(key, value);
    } else {
        raise(ErrorCode::invalid_argument, "config: unknown key: " + key);
    }
}

void load_config_file(DetectionConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::file_not_found, "cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            raise(ErrorCode::invalid_argument,
                  path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);
        apply_config_key(cfg, key, value);
    }
}

std::vector<std::pair<std::string, std::string>> echo_config(const DetectionConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("coarse_sigma", format_double(cfg.coarse_sigma));
    out.emplace_back("fine_sigma", format_double(cfg.fine_sigma));
    out.emplace_back("iterations", std::to_string(cfg.iterations));
    out.emplace_back("shadow_fraction", format_double(cfg.shadow_fraction));
    out.emplace_back("gray_limit", cfg.gray_limit_mode == GrayLimitMode::otsu
                                       ? std::string("otsu")
                                       : "fixed:" + std::to_string(cfg.gray_limit_fixed));
    out.emplace_back("max_dist_factor", format_double(cfg.max_dist_factor));
    out.emplace_back("color_scale", format_double(cfg.color_scale));
    out.emplace_back("texton_k", std::to_string(cfg.texton_k));
    out.emplace_back("seed", std::to_string(cfg.texton_seed));
    // jobs is deliberately absent: it has no effect on any output, and the
    // echoed configuration must be byte-identical across worker counts.
    out.emplace_back("angle_max_deg", format_double(cfg.classifier.angle_max_deg));
    out.emplace_back("ratio_min", format_double(cfg.classifier.ratio_min));
    out.emplace_back("texture_skip_ratio", format_double(cfg.classifier.texture_skip_ratio));
    out.emplace_back("emd_max", format_double(cfg.classifier.emd_max));
    out.emplace_back("lum_bin_width", format_double(cfg.classifier.lum_bin_width));
    out.emplace_back("lum_peak_prominence", format_double(cfg.classifier.lum_peak_prominence));
    return out;
}

ConfigOverride parse_override(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        raise(ErrorCode::invalid_argument, "override must look like <pattern>=<key>:<value>: " + text);
    ConfigOverride o;
    o.pattern = text.substr(0, eq);
    const std::string rest = text.substr(eq + 1);
    const auto colon = rest.find(':');
    if (colon == std::string::npos || colon == 0)
        raise(ErrorCode::invalid_argument, "override must look like <pattern>=<key>:<value>: " + text);
    o.key = rest.substr(0, colon);
    o.value = rest.substr(colon + 1);
    return o;
}

}  // namespace umbra
