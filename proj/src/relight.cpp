#include "relight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "parallel.hpp"

namespace umbra {

RelightCoefficients relight_coefficients(const PairLinks& links,
                                         const std::vector<SegmentStats>& stats) {
    std::map<int, std::vector<int>> partners;
    for (const auto& [s, n] : links.links) partners[s].push_back(n);
    for (int s : links.shadow_set)
        if (!partners.count(s))
            raise(ErrorCode::invalid_argument,
                  "relight_coefficients: shadow segment " + std::to_string(s) + " has no link");

    RelightCoefficients coeffs;
    for (auto& [s, ns] : partners) {
        const SegmentStats& shadow = stats.at(s);
        std::array<double, 3> k{1.0, 1.0, 1.0};
        std::vector<double> ratios;
        ratios.reserve(ns.size());
        for (int c = 0; c < 3; ++c) {
            const double denom = std::max(1.0, shadow.median_rgb[c]);
            ratios.clear();
            for (int n : ns) ratios.push_back(stats.at(n).median_rgb[c] / denom);
            std::sort(ratios.begin(), ratios.end());
            k[c] = ratios[ratios.size() / 2];  // upper median
        }
        coeffs[s] = k;
    }
    return coeffs;
}

RasterImage remove_shadows(const RasterImage& img, const ShadowMask& mask, const SegmentMap& seg,
                           const RelightCoefficients& coeffs, int jobs) {
    if (img.width != mask.width || img.height != mask.height || img.width != seg.width ||
        img.height != seg.height)
        raise(ErrorCode::dimension_mismatch, "remove_shadows: inconsistent dimensions");

    // Coefficient per segment; segments outside the table inherit from the
    // nearest coefficient-bearing segment by centroid distance (ties to the
    // lowest id). Only segments that actually contain masked pixels need one.
    const std::size_t n = img.pixel_count();
    std::vector<std::array<double, 3>> table(seg.segment_count, {1.0, 1.0, 1.0});
    std::vector<std::uint8_t> has(seg.segment_count, 0);
    for (const auto& [s, k] : coeffs) {
        if (s < 0 || s >= seg.segment_count)
            raise(ErrorCode::invalid_argument, "remove_shadows: coefficient for unknown segment");
        table[s] = k;
        has[s] = 1;
    }

    std::vector<std::uint8_t> needs(seg.segment_count, 0);
    for (std::size_t i = 0; i < n; ++i)
        if (mask.mask[i]) needs[seg.labels[i]] = 1;

    bool any_missing = false;
    for (int s = 0; s < seg.segment_count; ++s)
        if (needs[s] && !has[s]) any_missing = true;
    if (any_missing) {
        if (coeffs.empty())
            raise(ErrorCode::invalid_argument,
                  "remove_shadows: masked pixels present but no coefficients");
        std::vector<double> cx(seg.segment_count, 0.0), cy(seg.segment_count, 0.0);
        std::vector<std::int64_t> cnt(seg.segment_count, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const int s = seg.labels[i];
            cx[s] += static_cast<double>(i % seg.width);
            cy[s] += static_cast<double>(i / seg.width);
            ++cnt[s];
        }
        for (int s = 0; s < seg.segment_count; ++s) {
            if (cnt[s] > 0) {
                cx[s] /= static_cast<double>(cnt[s]);
                cy[s] /= static_cast<double>(cnt[s]);
            }
        }
        for (int s = 0; s < seg.segment_count; ++s) {
            if (!needs[s] || has[s]) continue;
            int best = -1;
            double best_d = std::numeric_limits<double>::infinity();
            for (const auto& [t, k] : coeffs) {
                const double dx = cx[s] - cx[t];
                const double dy = cy[s] - cy[t];
                const double d = dx * dx + dy * dy;
                if (d < best_d) {
                    best_d = d;
                    best = t;
                }
            }
            table[s] = table[best];
        }
    }

    RasterImage out = img;
    parallel_for(jobs, n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            if (!mask.mask[i]) continue;
            const auto& k = table[seg.labels[i]];
            std::uint8_t* p = out.pixels.data() + i * 3;
            for (int c = 0; c < 3; ++c) {
                const long v = std::lround(k[c] * p[c]);
                p[c] = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
            }
        }
    });
    return out;
}

}  // namespace umbra
