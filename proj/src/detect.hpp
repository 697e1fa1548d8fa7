#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "classify.hpp"
#include "quickshift.hpp"
#include "raster.hpp"
#include "texture.hpp"

namespace umbra {

// Directed shadow -> non-shadow links. No segment ever holds both roles.
struct PairLinks {
    std::vector<std::pair<int, int>> links;  // (shadow, nonshadow), sorted
    std::set<int> shadow_set;
    std::set<int> nonshadow_set;

    bool classified(int id) const {
        return shadow_set.count(id) != 0 || nonshadow_set.count(id) != 0;
    }
    void add(int shadow, int nonshadow);
};

struct ShadowMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> mask;  // 1 = shadow

    ShadowMask() = default;
    ShadowMask(int w, int h) : width(w), height(h), mask(static_cast<std::size_t>(w) * h, 0) {}

    bool at(int x, int y) const { return mask[static_cast<std::size_t>(y) * width + x] != 0; }
    std::size_t count() const;

    bool operator==(const ShadowMask&) const = default;
};

enum class GrayLimitMode { otsu, fixed };

struct DetectionConfig {
    double coarse_sigma = 9.0;
    double fine_sigma = 3.0;
    int iterations = 3;            // pairing rounds; round 1 is the initial pairing
    double shadow_fraction = 0.7;  // strictly-more-than vote inside refinement
    GrayLimitMode gray_limit_mode = GrayLimitMode::otsu;
    int gray_limit_fixed = 89;     // used when mode == fixed; round(0.35 * 255)
    double max_dist_factor = 2.0;  // quickshift max_dist = factor * sigma
    double color_scale = 8.0;
    int texton_k = 32;
    std::uint64_t texton_seed = 0;
    int jobs = 0;  // 0 = all hardware threads
    ClassifierConfig classifier;

    QuickshiftParams coarse_params() const {
        return QuickshiftParams::for_sigma(coarse_sigma, max_dist_factor, color_scale);
    }
    QuickshiftParams fine_params() const {
        return QuickshiftParams::for_sigma(fine_sigma, max_dist_factor, color_scale);
    }
};

// Classifies every adjacent segment pair; accepted verdicts become links.
// When a segment would receive both roles, the link with the larger angle is
// dropped (ties drop the later pair in (min id, max id) order).
PairLinks initial_pairing(const RegionAdjacency& adj, const std::vector<SegmentStats>& stats,
                          const std::vector<double>& ground, const ClassifierConfig& cfg);

// Growth rounds: unclassified neighbors of each shadow segment are compared
// against that link's non-shadow anchor; accepted shadow-role verdicts add
// links. Every round works from a frozen snapshot of the previous round.
PairLinks propagate(const PairLinks& links, const RegionAdjacency& adj,
                    const std::vector<SegmentStats>& stats, const std::vector<double>& ground,
                    const ClassifierConfig& cfg, int rounds);

// Rasterizes the shadow side of the links.
ShadowMask coarse_mask(const PairLinks& links, const SegmentMap& seg);

// Whole-segment vote: a fine segment containing at least one coarse-shadow
// pixel turns shadow iff strictly more than `fraction` of its pixels fall
// below the gray limit. Other segments stay non-shadow.
ShadowMask refine_vote(const GrayImage& gray, const SegmentMap& fine, const ShadowMask& coarse,
                       int gray_limit, double fraction);

// Fine re-segmentation at fine_sigma followed by refine_vote against the Otsu
// (or fixed) gray limit.
ShadowMask refine(const RasterImage& img, const ShadowMask& coarse, const DetectionConfig& cfg);

struct DetectionResult {
    ShadowMask mask;          // refined mask
    PairLinks links;
    SegmentMap coarse_seg;
    std::vector<SegmentStats> stats;
    int gray_limit = 0;
    int fine_segment_count = 0;
};

// The full pipeline: Lab conversion, coarse segmentation, texton pipeline,
// per-segment stats and luminance regions, pairing, propagation, coarse mask,
// refinement. Deterministic for fixed (image, config).
DetectionResult detect_shadows(const RasterImage& img, const DetectionConfig& cfg);

GrayImage mask_to_gray(const ShadowMask& mask);  // 255 = shadow

}  // namespace umbra
