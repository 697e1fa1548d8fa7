#include "quickshift.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>

#include "error.hpp"
#include "parallel.hpp"

namespace umbra {

namespace {

void validate(const QuickshiftParams& p) {
    if (!(p.sigma > 0.0) || !(p.max_dist > 0.0) || !(p.color_scale > 0.0))
        raise(ErrorCode::invalid_argument, "quickshift params must be positive");
}

// Parzen density with a Gaussian kernel over the joint feature space,
// truncated at a square window of radius 3*sigma.
std::vector<double> compute_density(const LabImage& lab, const QuickshiftParams& p, int jobs) {
    const int w = lab.width, h = lab.height;
    const int radius = static_cast<int>(std::ceil(3.0 * p.sigma));
    const double inv2s2 = 1.0 / (2.0 * p.sigma * p.sigma);
    const double cs2 = p.color_scale * p.color_scale;
    std::vector<double> density(static_cast<std::size_t>(w) * h);

    parallel_for(jobs, static_cast<std::size_t>(h), [&](std::size_t y0, std::size_t y1) {
        for (std::size_t y = y0; y < y1; ++y) {
            for (int x = 0; x < w; ++x) {
                const float* fi = lab.at(x, static_cast<int>(y));
                const int ylo = std::max<int>(0, static_cast<int>(y) - radius);
                const int yhi = std::min<int>(h - 1, static_cast<int>(y) + radius);
                const int xlo = std::max(0, x - radius);
                const int xhi = std::min(w - 1, x + radius);
                double sum = 0.0;
                for (int yy = ylo; yy <= yhi; ++yy) {
                    const double dy = static_cast<double>(yy) - static_cast<double>(y);
                    const float* row = lab.at(xlo, yy);
                    for (int xx = xlo; xx <= xhi; ++xx, row += 3) {
                        const double dx = static_cast<double>(xx - x);
                        const double dl = row[0] - fi[0];
                        const double da = row[1] - fi[1];
                        const double db = row[2] - fi[2];
                        const double d2 = dx * dx + dy * dy + cs2 * (dl * dl + da * da + db * db);
                        sum += std::exp(-d2 * inv2s2);
                    }
                }
                density[y * w + x] = sum;
            }
        }
    });
    return density;
}

// Parent links: nearest neighbor (feature distance, ties to the lowest
// row-major index) that ranks strictly higher in (density, lower index) order,
// within max_dist. The secondary index order makes density plateaus chain to a
// single representative instead of fragmenting into per-pixel roots.
std::vector<std::int64_t> link_parents(const LabImage& lab, const std::vector<double>& density,
                                       const QuickshiftParams& p, int jobs) {
    const int w = lab.width, h = lab.height;
    const int radius = static_cast<int>(std::ceil(p.max_dist));
    const double max_d2 = p.max_dist * p.max_dist;
    const double cs2 = p.color_scale * p.color_scale;
    std::vector<std::int64_t> parent(static_cast<std::size_t>(w) * h);

    parallel_for(jobs, static_cast<std::size_t>(h), [&](std::size_t y0, std::size_t y1) {
        for (std::size_t y = y0; y < y1; ++y) {
            for (int x = 0; x < w; ++x) {
                const std::int64_t i = static_cast<std::int64_t>(y) * w + x;
                const float* fi = lab.at(x, static_cast<int>(y));
                const double di = density[i];
                const int ylo = std::max<int>(0, static_cast<int>(y) - radius);
                const int yhi = std::min<int>(h - 1, static_cast<int>(y) + radius);
                const int xlo = std::max(0, x - radius);
                const int xhi = std::min(w - 1, x + radius);
                std::int64_t best = i;
                double best_d2 = max_d2;
                for (int yy = ylo; yy <= yhi; ++yy) {
                    const double dy = static_cast<double>(yy) - static_cast<double>(y);
                    const float* row = lab.at(xlo, yy);
                    std::int64_t j = static_cast<std::int64_t>(yy) * w + xlo;
                    for (int xx = xlo; xx <= xhi; ++xx, row += 3, ++j) {
                        if (j == i) continue;
                        const double dj = density[j];
                        if (dj < di || (dj == di && j > i)) continue;
                        const double dx = static_cast<double>(xx - x);
                        const double dl = row[0] - fi[0];
                        const double da = row[1] - fi[1];
                        const double db = row[2] - fi[2];
                        const double d2 = dx * dx + dy * dy + cs2 * (dl * dl + da * da + db * db);
                        if (d2 > max_d2) continue;
                        if (best == i || d2 < best_d2) {
                            best_d2 = d2;
                            best = j;
                        }
                    }
                }
                parent[i] = best;
            }
        }
    });
    return parent;
}

}  // namespace

SegmentMap quickshift_segment(const LabImage& lab, const QuickshiftParams& params, int jobs) {
    validate(params);
    const int w = lab.width, h = lab.height;
    if (w < 1 || h < 1) raise(ErrorCode::invalid_argument, "quickshift: empty image");
    const std::size_t n = static_cast<std::size_t>(w) * h;

    const std::vector<double> density = compute_density(lab, params, jobs);
    std::vector<std::int64_t> parent = link_parents(lab, density, params, jobs);

    // Resolve every pixel to its tree root (path-compressing as we go).
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t r = static_cast<std::int64_t>(i);
        while (parent[r] != r) r = parent[r];
        std::int64_t c = static_cast<std::int64_t>(i);
        while (parent[c] != r) {
            std::int64_t next = parent[c];
            parent[c] = r;
            c = next;
        }
    }

    // Split root groups into 4-connected components; the scan order yields
    // compact labels deterministically.
    SegmentMap seg;
    seg.width = w;
    seg.height = h;
    seg.labels.assign(n, -1);
    int next_label = 0;
    std::deque<std::int64_t> queue;
    for (std::size_t start = 0; start < n; ++start) {
        if (seg.labels[start] >= 0) continue;
        const std::int64_t root = parent[start];
        const int label = next_label++;
        seg.labels[start] = label;
        queue.push_back(static_cast<std::int64_t>(start));
        while (!queue.empty()) {
            const std::int64_t cur = queue.front();
            queue.pop_front();
            const int cx = static_cast<int>(cur % w);
            const int cy = static_cast<int>(cur / w);
            const int nx[4] = {cx - 1, cx + 1, cx, cx};
            const int ny[4] = {cy, cy, cy - 1, cy + 1};
            for (int k = 0; k < 4; ++k) {
                if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
                const std::int64_t ni = static_cast<std::int64_t>(ny[k]) * w + nx[k];
                if (seg.labels[ni] < 0 && parent[ni] == root) {
                    seg.labels[ni] = label;
                    queue.push_back(ni);
                }
            }
        }
    }
    seg.segment_count = next_label;
    return seg;
}

SegmentMap quickshift_segment(const RasterImage& img, const QuickshiftParams& params, int jobs) {
    return quickshift_segment(rgb_to_lab(img), params, jobs);
}

RegionAdjacency build_adjacency(const SegmentMap& seg) {
    RegionAdjacency adj;
    adj.neighbors.assign(seg.segment_count, {});
    const int w = seg.width, h = seg.height;
    auto touch = [&adj](int a, int b) {
        if (a == b) return;
        adj.neighbors[a].push_back(b);
        adj.neighbors[b].push_back(a);
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int l = seg.label(x, y);
            if (x + 1 < w) touch(l, seg.label(x + 1, y));
            if (y + 1 < h) touch(l, seg.label(x, y + 1));
        }
    }
    for (auto& list : adj.neighbors) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

RasterImage segment_mean_color_image(const RasterImage& img, const SegmentMap& seg) {
    if (img.width != seg.width || img.height != seg.height)
        raise(ErrorCode::dimension_mismatch, "segment map does not match image");
    std::vector<std::array<std::uint64_t, 4>> acc(seg.segment_count, {0, 0, 0, 0});
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = acc[seg.labels[i]];
        const std::uint8_t* p = img.pixels.data() + i * 3;
        a[0] += p[0];
        a[1] += p[1];
        a[2] += p[2];
        a[3] += 1;
    }
    RasterImage out(img.width, img.height);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = acc[seg.labels[i]];
        std::uint8_t* p = out.pixels.data() + i * 3;
        p[0] = static_cast<std::uint8_t>((a[0] + a[3] / 2) / a[3]);
        p[1] = static_cast<std::uint8_t>((a[1] + a[3] / 2) / a[3]);
        p[2] = static_cast<std::uint8_t>((a[2] + a[3] / 2) / a[3]);
    }
    return out;
}

}  // namespace umbra
