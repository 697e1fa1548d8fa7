#include "classify.hpp"

#include <algorithm>
#include <cmath>

#include "emd.hpp"
#include "error.hpp"

namespace umbra {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNearBlackL = 0.5;
constexpr double kRatioCap = 1000.0;

template <typename T>
T upper_median(std::vector<T>& values) {
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    return values[mid];
}

}  // namespace

std::vector<SegmentStats> segment_stats(const RasterImage& img, const LabImage& lab,
                                        const SegmentMap& seg, const std::vector<int>& textons,
                                        int texton_k) {
    if (img.width != seg.width || img.height != seg.height || lab.width != seg.width ||
        lab.height != seg.height)
        raise(ErrorCode::dimension_mismatch, "segment_stats: inconsistent dimensions");
    if (textons.size() != img.pixel_count())
        raise(ErrorCode::dimension_mismatch, "segment_stats: texton map does not cover the image");

    const std::size_t n = img.pixel_count();
    std::vector<std::vector<std::size_t>> members(seg.segment_count);
    for (std::size_t i = 0; i < n; ++i) members[seg.labels[i]].push_back(i);

    std::vector<SegmentStats> stats(seg.segment_count);
    std::vector<std::uint8_t> channel;
    std::vector<float> lvals;
    for (int s = 0; s < seg.segment_count; ++s) {
        SegmentStats& st = stats[s];
        st.id = s;
        st.pixel_count = static_cast<int>(members[s].size());
        for (int c = 0; c < 3; ++c) {
            channel.clear();
            for (std::size_t i : members[s]) channel.push_back(img.pixels[i * 3 + c]);
            st.median_rgb[c] = upper_median(channel);
        }
        lvals.clear();
        for (std::size_t i : members[s]) lvals.push_back(lab.pixels[i * 3]);
        st.median_l = upper_median(lvals);
        st.texton_hist.assign(texton_k, 0.0);
        for (std::size_t i : members[s]) ++st.texton_hist[textons[i]];
        const double inv = 1.0 / static_cast<double>(st.pixel_count);
        for (double& v : st.texton_hist) v *= inv;
    }
    return stats;
}

double reflectance_angle(const std::array<double, 3>& i_ns, const std::array<double, 3>& i_s) {
    const double ns_norm2 = i_ns[0] * i_ns[0] + i_ns[1] * i_ns[1] + i_ns[2] * i_ns[2];
    if (ns_norm2 <= 0.0)
        raise(ErrorCode::invalid_argument, "reflectance_angle: zero reference vector");
    std::array<double, 3> d{i_ns[0] - i_s[0], i_ns[1] - i_s[1], i_ns[2] - i_s[2]};
    const double d_norm2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    if (d_norm2 < 1e-9 * 1e-9)
        raise(ErrorCode::degenerate_input, "reflectance_angle: identical medians");
    // atan2(|cross|, dot) stays accurate for near-parallel vectors, where
    // acos of the normalized dot loses ~8 digits.
    const double cx = d[1] * i_ns[2] - d[2] * i_ns[1];
    const double cy = d[2] * i_ns[0] - d[0] * i_ns[2];
    const double cz = d[0] * i_ns[1] - d[1] * i_ns[0];
    const double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
    const double dot = d[0] * i_ns[0] + d[1] * i_ns[1] + d[2] * i_ns[2];
    return std::atan2(cross, dot) * 180.0 / kPi;
}

std::vector<double> luminance_regions(std::vector<SegmentStats>& stats,
                                      const ClassifierConfig& cfg) {
    if (stats.empty()) raise(ErrorCode::invalid_argument, "luminance_regions: no segments");
    const double width = cfg.lum_bin_width;
    const int nbins = std::max(1, static_cast<int>(std::ceil(100.0 / width)));
    // Pixel-weighted histogram: a peak stands for an illumination *area*, so
    // a large region must not be drowned out by swarms of tiny segments.
    std::vector<std::int64_t> counts(nbins, 0);
    auto bin_of = [&](double l) {
        int b = static_cast<int>(l / width);
        return std::clamp(b, 0, nbins - 1);
    };
    for (const auto& st : stats) counts[bin_of(st.median_l)] += st.pixel_count;
    const std::int64_t tallest = *std::max_element(counts.begin(), counts.end());
    const double min_height = cfg.lum_peak_prominence * static_cast<double>(tallest);

    // Qualifying bins: non-strict local maxima at or above the height bar.
    std::vector<int> candidates;
    for (int b = 0; b < nbins; ++b) {
        if (counts[b] == 0 || static_cast<double>(counts[b]) < min_height) continue;
        const bool left_ok = b == 0 || counts[b] >= counts[b - 1];
        const bool right_ok = b == nbins - 1 || counts[b] >= counts[b + 1];
        if (left_ok && right_ok) candidates.push_back(b);
    }

    // Merge runs of adjacent candidate bins, keeping the taller (ties keep the
    // lower-L bin).
    std::vector<int> peaks;
    int prev_candidate = -2;
    for (int b : candidates) {
        if (b == prev_candidate + 1 && !peaks.empty()) {
            if (counts[b] > counts[peaks.back()]) peaks.back() = b;
        } else {
            peaks.push_back(b);
        }
        prev_candidate = b;
    }

    std::vector<double> centers;
    centers.reserve(peaks.size());
    for (int b : peaks) centers.push_back((b + 0.5) * width);

    for (auto& st : stats) {
        int best = 0;
        double best_d = std::abs(st.median_l - centers[0]);
        for (int p = 1; p < static_cast<int>(centers.size()); ++p) {
            const double d = std::abs(st.median_l - centers[p]);
            if (d < best_d) {
                best_d = d;
                best = p;
            }
        }
        st.luminance_region = best;
    }
    return centers;
}

LuminanceRatio luminance_ratio(const SegmentStats& a, const SegmentStats& b) {
    const double la = a.median_l, lb = b.median_l;
    if (la < kNearBlackL && lb < kNearBlackL)
        raise(ErrorCode::degenerate_input, "luminance_ratio: both segments near black");
    LuminanceRatio r;
    const bool a_darker = la < lb || (la == lb && a.id < b.id);
    const double lo = std::min(la, lb), hi = std::max(la, lb);
    r.darker_id = a_darker ? a.id : b.id;
    r.t = lo > hi / kRatioCap ? hi / lo : kRatioCap;
    return r;
}

PairVerdict classify_pair(const SegmentStats& a, const SegmentStats& b,
                          const std::vector<double>& ground, const ClassifierConfig& cfg) {
    PairVerdict v;
    if (a.luminance_region == b.luminance_region) {
        v.reject_reason = RejectReason::same_region;
        return v;
    }
    LuminanceRatio lr;
    try {
        lr = luminance_ratio(a, b);
    } catch (const Error&) {
        v.reject_reason = RejectReason::degenerate;
        return v;
    }
    v.ratio_t = lr.t;
    if (!(lr.t > cfg.ratio_min)) {
        v.reject_reason = RejectReason::low_ratio;
        return v;
    }
    const SegmentStats& shadow = lr.darker_id == a.id ? a : b;
    const SegmentStats& nonshadow = lr.darker_id == a.id ? b : a;
    v.shadow_id = shadow.id;
    v.nonshadow_id = nonshadow.id;
    try {
        v.angle_deg = reflectance_angle(nonshadow.median_rgb, shadow.median_rgb);
    } catch (const Error&) {
        v.reject_reason = RejectReason::degenerate;
        return v;
    }
    if (v.angle_deg > cfg.angle_max_deg) {
        v.reject_reason = RejectReason::angle;
        return v;
    }
    if (lr.t > cfg.texture_skip_ratio) {
        v.emd_skipped_high_ratio = true;
    } else {
        v.emd_value = emd(shadow.texton_hist, nonshadow.texton_hist, ground);
        if (*v.emd_value > cfg.emd_max) {
            v.reject_reason = RejectReason::texture;
            return v;
        }
    }
    v.accepted = true;
    return v;
}

}  // namespace umbra
