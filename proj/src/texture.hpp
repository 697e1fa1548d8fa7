#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quickshift.hpp"
#include "raster.hpp"

namespace umbra {

struct FilterKernel {
    int half = 0;  // kernel is (2*half+1) x (2*half+1)
    std::vector<double> taps;
    std::string name;

    int side() const { return 2 * half + 1; }
    double tap(int dx, int dy) const {
        return taps[static_cast<std::size_t>(dy + half) * side() + (dx + half)];
    }
};

// 19 kernels: 1 Gaussian, 2 Laplacian-of-Gaussian, and even/odd oriented edge
// pairs at 4 orientations x 2 scales. All kernels are L1-normalized; every
// kernel except the Gaussian is zero-mean.
struct FilterBank {
    std::vector<FilterKernel> kernels;

    int max_side() const;
    static FilterBank make_default();
};

// Per-pixel filter response vectors, pixel-major layout.
struct ResponseGrid {
    int width = 0;
    int height = 0;
    int dim = 0;
    std::vector<float> data;

    const float* at(std::size_t pixel) const { return data.data() + pixel * dim; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

// Convolves the image (reflect-padded) with every kernel in the bank.
// Throws image_too_small when either dimension is below the largest kernel side.
ResponseGrid filter_responses(const GrayImage& img, const FilterBank& bank, int jobs = 0);

// Weber-law contrast normalization per pixel: r <- r * log(1 + |r|/l0) / |r|.
// Compresses response magnitude so texton identity tracks local structure
// rather than absolute brightness; without it a dimmed copy of a texture
// lands in different textons than the original.
ResponseGrid contrast_normalize(const ResponseGrid& responses, double l0 = 7.65, int jobs = 0);

struct TextonCodebook {
    int dim = 0;
    std::vector<std::vector<double>> centers;

    int size() const { return static_cast<int>(centers.size()); }
};

// K-means over all response vectors: k-means++ seeding driven by the seed,
// Lloyd iterations until max center movement < 1e-4 or 50 iterations. When
// fewer than k distinct vectors exist, the codebook collapses to the distinct
// set (first-occurrence order).
TextonCodebook learn_textons(const ResponseGrid& responses, int k, std::uint64_t seed,
                             int jobs = 0);

// Nearest codebook center per pixel (Euclidean, ties to the lowest index).
std::vector<int> texton_map(const ResponseGrid& responses, const TextonCodebook& codebook,
                            int jobs = 0);

// Normalized K-bin histogram over one segment's pixels.
std::vector<double> texton_histogram(const ResponseGrid& responses,
                                     const std::vector<std::size_t>& pixel_indices,
                                     const TextonCodebook& codebook);

// Euclidean distances between codebook centers, normalized by the largest
// pair distance so values live in [0, 1]. Row-major K x K.
std::vector<double> ground_distance_matrix(const TextonCodebook& codebook);

// Debug rendering of the texton label map as an indexed grayscale PNG-ready image.
GrayImage texton_label_image(const ResponseGrid& responses, const TextonCodebook& codebook);

}  // namespace umbra
