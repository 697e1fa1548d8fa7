#include "texture.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <unordered_set>

#include "error.hpp"
#include "parallel.hpp"

namespace umbra {

namespace {

constexpr double kPi = 3.14159265358979323846;

FilterKernel finalize(FilterKernel k, bool zero_mean) {
    const std::size_t n = k.taps.size();
    if (zero_mean) {
        double mean = 0.0;
        for (double t : k.taps) mean += t;
        mean /= static_cast<double>(n);
        for (double& t : k.taps) t -= mean;
    }
    double l1 = 0.0;
    for (double t : k.taps) l1 += std::abs(t);
    if (l1 > 0.0)
        for (double& t : k.taps) t /= l1;
    return k;
}

FilterKernel gaussian_kernel(double sigma, int half) {
    FilterKernel k;
    k.half = half;
    k.name = "gauss";
    k.taps.resize(static_cast<std::size_t>(k.side()) * k.side());
    for (int dy = -half; dy <= half; ++dy)
        for (int dx = -half; dx <= half; ++dx)
            k.taps[static_cast<std::size_t>(dy + half) * k.side() + (dx + half)] =
                std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    return finalize(std::move(k), false);
}

FilterKernel log_kernel(double sigma, int half) {
    FilterKernel k;
    k.half = half;
    k.name = "log_s" + std::to_string(static_cast<int>(sigma));
    k.taps.resize(static_cast<std::size_t>(k.side()) * k.side());
    const double s2 = sigma * sigma;
    for (int dy = -half; dy <= half; ++dy)
        for (int dx = -half; dx <= half; ++dx) {
            const double r2 = dx * dx + dy * dy;
            k.taps[static_cast<std::size_t>(dy + half) * k.side() + (dx + half)] =
                (r2 - 2.0 * s2) / (s2 * s2) * std::exp(-r2 / (2.0 * s2));
        }
    return finalize(std::move(k), true);
}

// Oriented edge pair. The derivative acts along direction `angle` (so angle 0
// responds to vertical edges); the envelope is elongated along the edge.
// "odd" is the first derivative of the Gaussian, "even" the second.
FilterKernel oriented_kernel(double angle, double sigma_across, bool even, int half,
                             const std::string& name) {
    FilterKernel k;
    k.half = half;
    k.name = name;
    k.taps.resize(static_cast<std::size_t>(k.side()) * k.side());
    const double sigma_along = 2.0 * sigma_across;
    const double ca = std::cos(angle), sa = std::sin(angle);
    const double su2 = sigma_across * sigma_across;
    const double sv2 = sigma_along * sigma_along;
    for (int dy = -half; dy <= half; ++dy)
        for (int dx = -half; dx <= half; ++dx) {
            const double u = dx * ca + dy * sa;   // across the edge
            const double v = -dx * sa + dy * ca;  // along the edge
            const double env = std::exp(-u * u / (2.0 * su2) - v * v / (2.0 * sv2));
            const double d = even ? (u * u / su2 - 1.0) / su2 : -u / su2;
            k.taps[static_cast<std::size_t>(dy + half) * k.side() + (dx + half)] = d * env;
        }
    return finalize(std::move(k), true);
}

}  // namespace

int FilterBank::max_side() const {
    int m = 0;
    for (const auto& k : kernels) m = std::max(m, k.side());
    return m;
}

FilterBank FilterBank::make_default() {
    FilterBank bank;
    bank.kernels.push_back(gaussian_kernel(2.0, 5));
    bank.kernels.push_back(log_kernel(1.0, 4));
    bank.kernels.push_back(log_kernel(2.0, 7));
    const double scales[2] = {1.0, 1.6};
    const int halves[2] = {5, 8};
    for (int s = 0; s < 2; ++s) {
        for (int o = 0; o < 4; ++o) {
            const double angle = o * kPi / 4.0;
            const std::string tag = "_o" + std::to_string(o * 45) + "_s" + std::to_string(s + 1);
            bank.kernels.push_back(
                oriented_kernel(angle, scales[s], true, halves[s], "even" + tag));
            bank.kernels.push_back(
                oriented_kernel(angle, scales[s], false, halves[s], "odd" + tag));
        }
    }
    return bank;
}

ResponseGrid filter_responses(const GrayImage& img, const FilterBank& bank, int jobs) {
    const int side = bank.max_side();
    if (img.width < side || img.height < side)
        raise(ErrorCode::image_too_small,
              "image " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                  " is smaller than the largest filter kernel (" + std::to_string(side) + ")");

    ResponseGrid grid;
    grid.width = img.width;
    grid.height = img.height;
    grid.dim = static_cast<int>(bank.kernels.size());
    grid.data.resize(grid.pixel_count() * grid.dim);

    const int w = img.width, h = img.height;
    auto reflect = [](int i, int n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
        return i;
    };

    for (int ki = 0; ki < grid.dim; ++ki) {
        const FilterKernel& k = bank.kernels[ki];
        parallel_for(jobs, static_cast<std::size_t>(h), [&](std::size_t y0, std::size_t y1) {
            for (std::size_t y = y0; y < y1; ++y) {
                for (int x = 0; x < w; ++x) {
                    double acc = 0.0;
                    for (int dy = -k.half; dy <= k.half; ++dy) {
                        const int yy = reflect(static_cast<int>(y) + dy, h);
                        const std::uint8_t* row = img.pixels.data() +
                                                  static_cast<std::size_t>(yy) * w;
                        for (int dx = -k.half; dx <= k.half; ++dx) {
                            const int xx = reflect(x + dx, w);
                            acc += k.tap(dx, dy) * row[xx];
                        }
                    }
                    grid.data[(y * w + x) * grid.dim + ki] = static_cast<float>(acc);
                }
            }
        });
    }
    return grid;
}

ResponseGrid contrast_normalize(const ResponseGrid& responses, double l0, int jobs) {
    if (!(l0 > 0.0)) raise(ErrorCode::invalid_argument, "contrast_normalize: l0 must be positive");
    ResponseGrid out = responses;
    const int dim = out.dim;
    parallel_for(jobs, out.pixel_count(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            float* r = out.data.data() + i * dim;
            double norm2 = 0.0;
            for (int d = 0; d < dim; ++d) norm2 += static_cast<double>(r[d]) * r[d];
            const double norm = std::sqrt(norm2);
            if (norm <= 0.0) continue;
            const double scale = std::log1p(norm / l0) / norm;
            for (int d = 0; d < dim; ++d) r[d] = static_cast<float>(r[d] * scale);
        }
    });
    return out;
}

namespace {

double sq_dist(const float* p, const std::vector<double>& c, int dim) {
    double d = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double diff = p[i] - c[i];
        d += diff * diff;
    }
    return d;
}

int nearest_center(const float* p, const std::vector<std::vector<double>>& centers, int dim) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = sq_dist(p, centers[c], dim);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

TextonCodebook learn_textons(const ResponseGrid& responses, int k, std::uint64_t seed, int jobs) {
    if (k < 2) raise(ErrorCode::invalid_argument, "texton count must be >= 2");
    const std::size_t n = responses.pixel_count();
    const int dim = responses.dim;
    if (n == 0) raise(ErrorCode::invalid_argument, "empty response grid");

    // Count distinct vectors (bit-exact) and collapse if below k.
    std::unordered_set<std::string> distinct;
    std::vector<std::size_t> first_occurrence;
    const std::size_t bytes = static_cast<std::size_t>(dim) * sizeof(float);
    for (std::size_t i = 0; i < n && distinct.size() < static_cast<std::size_t>(k); ++i) {
        std::string key(reinterpret_cast<const char*>(responses.at(i)), bytes);
        if (distinct.insert(std::move(key)).second) first_occurrence.push_back(i);
    }
    TextonCodebook book;
    book.dim = dim;
    if (distinct.size() < static_cast<std::size_t>(k)) {
        for (std::size_t i : first_occurrence) {
            const float* p = responses.at(i);
            book.centers.emplace_back(p, p + dim);
        }
        return book;
    }

    // k-means++ seeding.
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> centers;
    centers.reserve(k);
    {
        const std::size_t i0 = static_cast<std::size_t>(unit_uniform(rng) * n) % n;
        const float* p = responses.at(i0);
        centers.emplace_back(p, p + dim);
    }
    std::vector<double> min_d2(n);
    while (centers.size() < static_cast<std::size_t>(k)) {
        const auto& last = centers.back();
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = sq_dist(responses.at(i), last, dim);
            if (centers.size() == 1 || d < min_d2[i]) min_d2[i] = d;
            total += min_d2[i];
        }
        // total > 0 here: with >= k distinct vectors some point is off-center.
        std::size_t pick = n;
        const double target = unit_uniform(rng) * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (min_d2[i] <= 0.0) continue;
            pick = i;
            acc += min_d2[i];
            if (acc >= target) break;
        }
        const float* p = responses.at(pick);
        centers.emplace_back(p, p + dim);
    }

    // Lloyd iterations; assignment parallelizes, accumulation stays sequential
    // so the sums are order-identical for any jobs value.
    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < 50; ++iter) {
        parallel_for(jobs, n, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i)
                assign[i] = nearest_center(responses.at(i), centers, dim);
        });
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& s = sums[assign[i]];
            const float* p = responses.at(i);
            for (int d = 0; d < dim; ++d) s[d] += p[d];
            ++counts[assign[i]];
        }
        double max_move2 = 0.0;
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;  // empty cluster keeps its center
            double move2 = 0.0;
            for (int d = 0; d < dim; ++d) {
                const double nc = sums[c][d] / static_cast<double>(counts[c]);
                const double diff = nc - centers[c][d];
                move2 += diff * diff;
                centers[c][d] = nc;
            }
            max_move2 = std::max(max_move2, move2);
        }
        if (max_move2 < 1e-4 * 1e-4) break;
    }
    book.centers = std::move(centers);
    return book;
}

std::vector<int> texton_map(const ResponseGrid& responses, const TextonCodebook& codebook,
                            int jobs) {
    if (codebook.dim != responses.dim)
        raise(ErrorCode::dimension_mismatch, "codebook dimension does not match responses");
    const std::size_t n = responses.pixel_count();
    std::vector<int> map(n);
    parallel_for(jobs, n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            map[i] = nearest_center(responses.at(i), codebook.centers, codebook.dim);
    });
    return map;
}

std::vector<double> texton_histogram(const ResponseGrid& responses,
                                     const std::vector<std::size_t>& pixel_indices,
                                     const TextonCodebook& codebook) {
    if (pixel_indices.empty())
        raise(ErrorCode::degenerate_input, "texton_histogram: empty segment");
    std::vector<double> hist(codebook.size(), 0.0);
    for (std::size_t i : pixel_indices) {
        if (i >= responses.pixel_count())
            raise(ErrorCode::invalid_argument, "texton_histogram: pixel outside grid");
        ++hist[nearest_center(responses.at(i), codebook.centers, codebook.dim)];
    }
    const double inv = 1.0 / static_cast<double>(pixel_indices.size());
    for (double& v : hist) v *= inv;
    return hist;
}

std::vector<double> ground_distance_matrix(const TextonCodebook& codebook) {
    const int k = codebook.size();
    std::vector<double> m(static_cast<std::size_t>(k) * k, 0.0);
    double max_d = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            double d2 = 0.0;
            for (int d = 0; d < codebook.dim; ++d) {
                const double diff = codebook.centers[i][d] - codebook.centers[j][d];
                d2 += diff * diff;
            }
            const double d1 = std::sqrt(d2);
            m[static_cast<std::size_t>(i) * k + j] = d1;
            m[static_cast<std::size_t>(j) * k + i] = d1;
            max_d = std::max(max_d, d1);
        }
    if (max_d > 0.0)
        for (double& v : m) v /= max_d;
    return m;
}

GrayImage texton_label_image(const ResponseGrid& responses, const TextonCodebook& codebook) {
    const auto map = texton_map(responses, codebook);
    GrayImage out(responses.width, responses.height);
    const int k = std::max(1, codebook.size());
    for (std::size_t i = 0; i < map.size(); ++i)
        out.pixels[i] = static_cast<std::uint8_t>(map[i] * 255 / std::max(1, k - 1));
    return out;
}

}  // namespace umbra
