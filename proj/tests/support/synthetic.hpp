#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "detect.hpp"
#include "raster.hpp"

// Constructed scenes with exact ground truth, shared by unit and acceptance
// tests.
namespace umbra::testing {

struct ShadowScene {
    RasterImage base;     // scene before dimming
    RasterImage dimmed;   // detection input
    ShadowMask truth;     // dimmed region
    double factor = 1.0;  // per-channel dim factor
};

// Textured base image: a dominant color (strictly more than half of every
// neighborhood) plus low-amplitude texture. kind selects dots, blocks or
// stripes.
RasterImage make_textured_base(int width, int height, std::array<int, 3> color, int kind,
                               std::uint64_t seed);

// One of ten canonical 256x256 scenes: palette color, texture kind, dim
// factor and region shape all vary with the index.
ShadowScene make_shadow_scene(int index);

// Smaller parametric scene for fast unit tests.
ShadowScene make_half_plane_scene(int width, int height, std::array<int, 3> color,
                                  double factor, int texture_kind, std::uint64_t seed);

double mask_iou(const ShadowMask& a, const ShadowMask& b);

// Scratch directory under the system temp path, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

}  // namespace umbra::testing
