#pragma once

#include <vector>

#include "raster.hpp"

namespace umbra {

struct QuickshiftParams {
    double sigma = 9.0;        // density kernel bandwidth, pixels
    double max_dist = 18.0;    // maximum parent-link distance in feature space
    double color_scale = 8.0;  // multiplier on L,a,b before distance computation

    static QuickshiftParams for_sigma(double s, double max_dist_factor = 2.0,
                                      double color_scale = 8.0) {
        return {s, max_dist_factor * s, color_scale};
    }
};

// Per-pixel segment labels. Labels are compact (every id in [0, segment_count)
// occurs) and each segment is 4-connected.
struct SegmentMap {
    int width = 0;
    int height = 0;
    std::vector<int> labels;
    int segment_count = 0;

    int label(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

// Neighbor sets over segment ids; symmetric and irreflexive. Each list is
// sorted ascending.
struct RegionAdjacency {
    std::vector<std::vector<int>> neighbors;
};

// Mode-seeking segmentation over the joint (x, y, scaled Lab) feature space.
// Each pixel links to its nearest neighbor that ranks higher in
// (density, lower row-major index) order within max_dist; link trees form the
// segments, which are then split into 4-connected pieces and relabeled
// compactly. Deterministic for fixed input and params.
SegmentMap quickshift_segment(const RasterImage& img, const QuickshiftParams& params,
                              int jobs = 0);
SegmentMap quickshift_segment(const LabImage& lab, const QuickshiftParams& params,
                              int jobs = 0);

RegionAdjacency build_adjacency(const SegmentMap& seg);

// Debug rendering: every segment painted with its mean sRGB color.
RasterImage segment_mean_color_image(const RasterImage& img, const SegmentMap& seg);

}  // namespace umbra
