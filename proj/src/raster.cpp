#include "raster.hpp"

#include <cmath>

#include "error.hpp"

namespace umbra {

namespace {

inline double srgb_linearize(double c8) {
    double s = c8 / 255.0;
    return s <= 0.04045 ? s / 12.92 : std::pow((s + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
    constexpr double kCube = 216.0 / 24389.0;   // (6/29)^3
    constexpr double kSlope = 24389.0 / 27.0 / 116.0;
    return t > kCube ? std::cbrt(t) : kSlope * t + 16.0 / 116.0;
}

}  // namespace

std::array<double, 3> srgb_to_lab(double r, double g, double b) {
    // sRGB D65 primaries.
    const double rl = srgb_linearize(r);
    const double gl = srgb_linearize(g);
    const double bl = srgb_linearize(b);
    const double x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
    const double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
    const double z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
    const double fx = lab_f(x / 0.95047);
    const double fy = lab_f(y / 1.0);
    const double fz = lab_f(z / 1.08883);
    double L = 116.0 * fy - 16.0;
    if (L < 0.0) L = 0.0;
    if (L > 100.0) L = 100.0;
    return {L, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

LabImage rgb_to_lab(const RasterImage& img) {
    LabImage out(img.width, img.height);
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* p = img.pixels.data() + i * 3;
        const auto lab = srgb_to_lab(p[0], p[1], p[2]);
        float* q = out.pixels.data() + i * 3;
        q[0] = static_cast<float>(lab[0]);
        q[1] = static_cast<float>(lab[1]);
        q[2] = static_cast<float>(lab[2]);
    }
    return out;
}

GrayImage rgb_to_gray(const RasterImage& img) {
    GrayImage out(img.width, img.height);
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* p = img.pixels.data() + i * 3;
        // BT.601 luma.
        long v = std::lround(0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]);
        if (v < 0) v = 0;
        if (v > 255) v = 255;
        out.pixels[i] = static_cast<std::uint8_t>(v);
    }
    return out;
}

int otsu_threshold(const std::array<std::uint64_t, 256>& histogram) {
    std::array<std::uint64_t, 256> hist = histogram;
    int lo = -1, hi = -1;
    std::uint64_t total = 0;
    for (int v = 0; v < 256; ++v) {
        if (hist[v] > 0) {
            if (lo < 0) lo = v;
            hi = v;
            total += hist[v];
        }
    }
    if (lo < 0) raise(ErrorCode::invalid_argument, "otsu_threshold: empty histogram");

    // Exact integer cross-multiplication needs total^6 to fit in __int128;
    // beyond ~5e5 pixels the histogram is halved (keeping nonzero bins) first.
    while (total > 500000) {
        total = 0;
        for (auto& c : hist) {
            if (c > 0) c = (c + 1) / 2;
            total += c;
        }
    }

    // Between-class variance sigma^2(t) = (s0*w1 - s1*w0)^2 / (w0*w1*N^2).
    // The N^2 factor is constant, so argmax comparisons reduce to exact
    // integer cross-multiplication; no floating point means ties are exact
    // and the lowest-level winner is unambiguous.
    using i128 = __int128;
    std::uint64_t w0 = 0, s0 = 0, wt = 0, st = 0;
    for (int v = lo; v <= hi; ++v) {
        wt += hist[v];
        st += hist[v] * static_cast<std::uint64_t>(v);
    }
    int best = lo;
    i128 best_num = -1;  // best variance = best_num / best_den
    i128 best_den = 1;
    for (int t = lo; t <= hi; ++t) {
        w0 += hist[t];
        s0 += hist[t] * static_cast<std::uint64_t>(t);
        const std::uint64_t w1 = wt - w0;
        const std::uint64_t s1 = st - s0;
        i128 num, den;
        if (w1 == 0) {
            num = 0;
            den = 1;
        } else {
            const i128 diff = static_cast<i128>(s0) * w1 - static_cast<i128>(s1) * w0;
            num = diff * diff;
            den = static_cast<i128>(w0) * w1;
        }
        // num/den > best_num/best_den  <=>  num*best_den > best_num*den
        if (best_num < 0 || num * best_den > best_num * den) {
            best_num = num;
            best_den = den;
            best = t;
        }
    }
    return best;
}

int otsu_threshold(const GrayImage& img) {
    if (img.pixels.empty()) raise(ErrorCode::invalid_argument, "otsu_threshold: empty image");
    std::array<std::uint64_t, 256> hist{};
    for (std::uint8_t v : img.pixels) ++hist[v];
    return otsu_threshold(hist);
}

}  // namespace umbra
