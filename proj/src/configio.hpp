#pragma once

#include <string>
#include <utility>
#include <vector>

#include "detect.hpp"

namespace umbra {

struct ConfigOverride;

// Applies one key=value setting; throws invalid_argument for unknown keys or
// unparsable values. Keys cover every DetectionConfig and ClassifierConfig
// field (see echo_config for the full list).
void apply_config_key(DetectionConfig& cfg, const std::string& key, const std::string& value);

// Plain key=value file, one setting per line, '#' starts a comment.
void load_config_file(DetectionConfig& cfg, const std::string& path);

// The effective configuration as ordered (key, value) pairs; applying them to
// a default config reproduces cfg exactly.
std::vector<std::pair<std::string, std::string>> echo_config(const DetectionConfig& cfg);

// Parses "<pattern>=<key>:<value>" (e.g. "oirds_*=gray_limit:fixed:89").
ConfigOverride parse_override(const std::string& text);

}  // namespace umbra
