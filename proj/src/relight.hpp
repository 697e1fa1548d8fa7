#pragma once

#include <array>
#include <map>

#include "classify.hpp"
#include "detect.hpp"
#include "raster.hpp"

namespace umbra {

// Per shadow segment id: the per-channel relighting factor
// k_c = non-shadow median_c / shadow median_c.
using RelightCoefficients = std::map<int, std::array<double, 3>>;

// Median (upper-median convention) over the linked partners' channel ratios.
// Shadow medians below 1 clamp the denominator to 1.
RelightCoefficients relight_coefficients(const PairLinks& links,
                                         const std::vector<SegmentStats>& stats);

// Multiplies each masked pixel by its segment's coefficients, rounding and
// clamping to [0, 255]; unmasked pixels are copied unchanged. Masked pixels in
// segments without coefficients inherit from the nearest linked shadow
// segment by centroid distance.
RasterImage remove_shadows(const RasterImage& img, const ShadowMask& mask, const SegmentMap& seg,
                           const RelightCoefficients& coeffs, int jobs = 0);

}  // namespace umbra
