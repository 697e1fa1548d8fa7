#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace umbra {

// 8-bit sRGB image, row-major interleaved RGB.
struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    RasterImage() = default;
    RasterImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    const std::uint8_t* at(int x, int y) const {
        return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    std::uint8_t* at(int x, int y) {
        return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }

    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        auto* p = at(x, y);
        p[0] = r; p[1] = g; p[2] = b;
    }

    bool operator==(const RasterImage&) const = default;
};

// CIELAB image, row-major interleaved (L, a, b); L is in [0, 100].
struct LabImage {
    int width = 0;
    int height = 0;
    std::vector<float> pixels;

    LabImage() = default;
    LabImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0.0f) {}

    const float* at(int x, int y) const {
        return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    float* at(int x, int y) {
        return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
};

// Single-channel 8-bit image.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t& at(int x, int y) {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }

    bool operator==(const GrayImage&) const = default;
};

// File I/O (PNG and JPEG, detected by magic bytes). Alpha is dropped,
// grayscale sources are replicated to three channels.
RasterImage load_image(const std::string& path);
void save_png(const RasterImage& img, const std::string& path);
void save_gray_png(const GrayImage& img, const std::string& path);
void save_jpeg(const RasterImage& img, const std::string& path, int quality = 92);

// Color conversions.
LabImage rgb_to_lab(const RasterImage& img);
std::array<double, 3> srgb_to_lab(double r, double g, double b);
GrayImage rgb_to_gray(const RasterImage& img);

// Global threshold maximizing between-class variance over the 256-bin
// histogram. Class 0 is {pixels <= t}; ties resolve to the lowest level; the
// search is restricted to [min level, max level], so a constant image returns
// its own level.
int otsu_threshold(const GrayImage& img);
int otsu_threshold(const std::array<std::uint64_t, 256>& histogram);

}  // namespace umbra
