#pragma once

#include <array>
#include <optional>
#include <vector>

#include "quickshift.hpp"
#include "raster.hpp"
#include "texture.hpp"

namespace umbra {

struct ClassifierConfig {
    double angle_max_deg = 10.0;      // reflectance angle criterion
    double ratio_min = 1.2;           // luminance ratio T must exceed this
    double texture_skip_ratio = 2.4;  // above this T the texture gate is skipped
    double emd_max = 0.5;             // normalized EMD threshold
    double lum_bin_width = 4.0;       // luminance histogram bin width, L units
    double lum_peak_prominence = 0.1; // fraction of the tallest bin
};

struct SegmentStats {
    int id = -1;
    std::array<double, 3> median_rgb{0, 0, 0};
    double median_l = 0.0;
    int pixel_count = 0;
    std::vector<double> texton_hist;
    int luminance_region = -1;
};

enum class RejectReason {
    none,
    same_region,
    low_ratio,
    angle,
    texture,
    degenerate,
};

struct PairVerdict {
    bool accepted = false;
    RejectReason reject_reason = RejectReason::none;
    double ratio_t = 0.0;                 // valid once the luminance gate ran
    double angle_deg = 0.0;               // valid once the angle gate ran
    std::optional<double> emd_value;      // empty when the texture gate never ran
    bool emd_skipped_high_ratio = false;  // T exceeded the texture-skip bound
    int shadow_id = -1;
    int nonshadow_id = -1;
};

// Per-segment medians, pixel count, and texton histogram. The texton map must
// cover the same pixel grid as the segmentation. Median convention: sorted
// values, index floor(n/2) (upper median).
std::vector<SegmentStats> segment_stats(const RasterImage& img, const LabImage& lab,
                                        const SegmentMap& seg, const std::vector<int>& textons,
                                        int texton_k);

// Angle in degrees between I_D = i_ns - i_s and i_ns. Throws degenerate_input
// when |I_D| ~ 0 (identical medians) and invalid_argument when |i_ns| = 0.
double reflectance_angle(const std::array<double, 3>& i_ns, const std::array<double, 3>& i_s);

// Groups segments into illumination regions from the histogram of median
// luminance values: qualifying peaks (local maxima at or above the prominence
// fraction of the tallest bin, adjacent maxima merged keeping the taller /
// lower-L one) become regions; each segment joins its nearest peak. Writes
// luminance_region into the stats and returns the peak centers.
std::vector<double> luminance_regions(std::vector<SegmentStats>& stats,
                                      const ClassifierConfig& cfg);

struct LuminanceRatio {
    double t = 1.0;  // >= 1, capped at 1000 near black
    int darker_id = -1;
};

// Ratio of the brighter median L to the darker. Throws degenerate_input when
// both segments are near black (median L < 0.5).
LuminanceRatio luminance_ratio(const SegmentStats& a, const SegmentStats& b);

// Runs the gate sequence: same-region, luminance ratio, reflectance angle,
// texture EMD (skipped when T exceeds texture_skip_ratio). The darker segment
// takes the shadow role. Symmetric in argument order.
PairVerdict classify_pair(const SegmentStats& a, const SegmentStats& b,
                          const std::vector<double>& ground, const ClassifierConfig& cfg);

}  // namespace umbra
