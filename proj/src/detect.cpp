#include "detect.hpp"

#include <algorithm>
#include <numeric>

#include "error.hpp"
#include "parallel.hpp"

namespace umbra {

void PairLinks::add(int shadow, int nonshadow) {
    if (shadow_set.count(nonshadow) || nonshadow_set.count(shadow))
        raise(ErrorCode::internal, "PairLinks: conflicting roles for a segment");
    auto link = std::make_pair(shadow, nonshadow);
    auto it = std::lower_bound(links.begin(), links.end(), link);
    if (it != links.end() && *it == link) return;
    links.insert(it, link);
    shadow_set.insert(shadow);
    nonshadow_set.insert(nonshadow);
}

std::size_t ShadowMask::count() const {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

namespace {

struct Candidate {
    double angle;
    int a, b;  // pair key, a < b
    int shadow, nonshadow;
};

}  // namespace

PairLinks initial_pairing(const RegionAdjacency& adj, const std::vector<SegmentStats>& stats,
                          const std::vector<double>& ground, const ClassifierConfig& cfg) {
    std::vector<Candidate> candidates;
    for (int a = 0; a < static_cast<int>(adj.neighbors.size()); ++a) {
        for (int b : adj.neighbors[a]) {
            if (b <= a) continue;
            const PairVerdict v = classify_pair(stats[a], stats[b], ground, cfg);
            if (v.accepted) candidates.push_back({v.angle_deg, a, b, v.shadow_id, v.nonshadow_id});
        }
    }
    // Smaller angle wins a role conflict; equal angles keep the earlier pair.
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
        if (x.angle != y.angle) return x.angle < y.angle;
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    PairLinks links;
    for (const Candidate& c : candidates) {
        if (links.nonshadow_set.count(c.shadow) || links.shadow_set.count(c.nonshadow)) continue;
        links.add(c.shadow, c.nonshadow);
    }
    return links;
}

PairLinks propagate(const PairLinks& links, const RegionAdjacency& adj,
                    const std::vector<SegmentStats>& stats, const std::vector<double>& ground,
                    const ClassifierConfig& cfg, int rounds) {
    PairLinks grown = links;
    for (int round = 0; round < rounds; ++round) {
        const PairLinks snapshot = grown;
        std::vector<std::pair<int, int>> added;
        for (const auto& [s, n] : snapshot.links) {
            for (int u : adj.neighbors[s]) {
                if (snapshot.classified(u)) continue;
                const PairVerdict v = classify_pair(stats[u], stats[n], ground, cfg);
                if (v.accepted && v.shadow_id == u) added.emplace_back(u, n);
            }
        }
        if (added.empty()) break;  // fixed point
        for (const auto& [u, n] : added) grown.add(u, n);
    }
    return grown;
}

ShadowMask coarse_mask(const PairLinks& links, const SegmentMap& seg) {
    ShadowMask mask(seg.width, seg.height);
    std::vector<std::uint8_t> is_shadow(seg.segment_count, 0);
    for (int s : links.shadow_set)
        if (s >= 0 && s < seg.segment_count) is_shadow[s] = 1;
    for (std::size_t i = 0; i < mask.mask.size(); ++i) mask.mask[i] = is_shadow[seg.labels[i]];
    return mask;
}

ShadowMask refine_vote(const GrayImage& gray, const SegmentMap& fine, const ShadowMask& coarse,
                       int gray_limit, double fraction) {
    if (gray.width != fine.width || gray.height != fine.height ||
        coarse.width != fine.width || coarse.height != fine.height)
        raise(ErrorCode::dimension_mismatch, "refine_vote: inconsistent dimensions");

    std::vector<std::int64_t> total(fine.segment_count, 0);
    std::vector<std::int64_t> below(fine.segment_count, 0);
    std::vector<std::uint8_t> touches(fine.segment_count, 0);
    const std::size_t n = gray.pixels.size();
    for (std::size_t i = 0; i < n; ++i) {
        const int s = fine.labels[i];
        ++total[s];
        if (gray.pixels[i] < gray_limit) ++below[s];
        if (coarse.mask[i]) touches[s] = 1;
    }
    std::vector<std::uint8_t> shadow(fine.segment_count, 0);
    for (int s = 0; s < fine.segment_count; ++s) {
        if (!touches[s]) continue;
        // Strict "more than"; the epsilon absorbs the binary representation
        // error of fractions like 0.7 without ever crossing a 1/n step.
        shadow[s] = static_cast<double>(below[s]) >
                            fraction * static_cast<double>(total[s]) + 1e-9
                        ? 1
                        : 0;
    }
    ShadowMask out(fine.width, fine.height);
    for (std::size_t i = 0; i < n; ++i) out.mask[i] = shadow[fine.labels[i]];
    return out;
}

ShadowMask refine(const RasterImage& img, const ShadowMask& coarse, const DetectionConfig& cfg) {
    if (img.width != coarse.width || img.height != coarse.height)
        raise(ErrorCode::dimension_mismatch, "refine: mask does not match image");
    const GrayImage gray = rgb_to_gray(img);
    const int limit = cfg.gray_limit_mode == GrayLimitMode::otsu ? otsu_threshold(gray)
                                                                 : cfg.gray_limit_fixed;
    const SegmentMap fine = quickshift_segment(img, cfg.fine_params(), cfg.jobs);
    return refine_vote(gray, fine, coarse, limit, cfg.shadow_fraction);
}

DetectionResult detect_shadows(const RasterImage& img, const DetectionConfig& cfg) {
    if (cfg.iterations < 1) raise(ErrorCode::invalid_argument, "iterations must be >= 1");
    if (!(cfg.shadow_fraction > 0.0 && cfg.shadow_fraction < 1.0))
        raise(ErrorCode::invalid_argument, "shadow_fraction must lie in (0, 1)");
    if (!(cfg.fine_sigma < cfg.coarse_sigma))
        raise(ErrorCode::invalid_argument, "fine_sigma must be smaller than coarse_sigma");
    const ClassifierConfig& cc = cfg.classifier;
    if (!(cc.angle_max_deg > 0.0 && cc.angle_max_deg < 90.0))
        raise(ErrorCode::invalid_argument, "angle_max_deg must lie in (0, 90)");
    if (!(cc.ratio_min > 1.0)) raise(ErrorCode::invalid_argument, "ratio_min must exceed 1");
    if (!(cc.texture_skip_ratio >= cc.ratio_min))
        raise(ErrorCode::invalid_argument, "texture_skip_ratio must be >= ratio_min");
    if (!(cc.emd_max > 0.0 && cc.emd_max <= 1.0))
        raise(ErrorCode::invalid_argument, "emd_max must lie in (0, 1]");
    if (!(cc.lum_bin_width > 0.0 && cc.lum_peak_prominence > 0.0 && cc.lum_peak_prominence <= 1.0))
        raise(ErrorCode::invalid_argument, "invalid luminance histogram settings");

    DetectionResult result;
    const LabImage lab = rgb_to_lab(img);
    result.coarse_seg = quickshift_segment(lab, cfg.coarse_params(), cfg.jobs);

    const GrayImage gray = rgb_to_gray(img);
    const FilterBank bank = FilterBank::make_default();
    // Contrast normalization keeps texton identity stable across the very
    // illumination change the pairing is trying to detect.
    const ResponseGrid responses =
        contrast_normalize(filter_responses(gray, bank, cfg.jobs), 7.65, cfg.jobs);
    const TextonCodebook codebook = learn_textons(responses, cfg.texton_k, cfg.texton_seed,
                                                  cfg.jobs);
    const std::vector<int> textons = texton_map(responses, codebook, cfg.jobs);
    const std::vector<double> ground = ground_distance_matrix(codebook);

    result.stats = segment_stats(img, lab, result.coarse_seg, textons, codebook.size());
    luminance_regions(result.stats, cfg.classifier);

    const RegionAdjacency adj = build_adjacency(result.coarse_seg);
    result.links = initial_pairing(adj, result.stats, ground, cfg.classifier);
    result.links = propagate(result.links, adj, result.stats, ground, cfg.classifier,
                             cfg.iterations - 1);

    const ShadowMask coarse = coarse_mask(result.links, result.coarse_seg);
    const int limit = cfg.gray_limit_mode == GrayLimitMode::otsu ? otsu_threshold(gray)
                                                                 : cfg.gray_limit_fixed;
    result.gray_limit = limit;
    const SegmentMap fine = quickshift_segment(lab, cfg.fine_params(), cfg.jobs);
    result.fine_segment_count = fine.segment_count;
    result.mask = refine_vote(gray, fine, coarse, limit, cfg.shadow_fraction);
    return result;
}

GrayImage mask_to_gray(const ShadowMask& mask) {
    GrayImage out(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.mask.size(); ++i) out.pixels[i] = mask.mask[i] ? 255 : 0;
    return out;
}

}  // namespace umbra
