#include <doctest.h>

#include <cmath>
#include <random>

#include "classify.hpp"
#include "error.hpp"
#include "raster.hpp"

using namespace umbra;

namespace {

SegmentStats make_stats(int id, std::array<double, 3> rgb, double l,
                        std::vector<double> hist = {1.0}, int region = -1) {
    SegmentStats s;
    s.id = id;
    s.median_rgb = rgb;
    s.median_l = l;
    s.pixel_count = 10;
    s.texton_hist = std::move(hist);
    s.luminance_region = region;
    return s;
}

const std::vector<double> kTrivialGround = {0.0};

}  // namespace

TEST_CASE("segment medians use the upper-median convention") {
    // Three known pixels in one segment.
    RasterImage img(3, 1);
    img.set(0, 0, 10, 20, 30);
    img.set(1, 0, 20, 30, 40);
    img.set(2, 0, 30, 40, 50);
    const LabImage lab = rgb_to_lab(img);
    SegmentMap seg;
    seg.width = 3;
    seg.height = 1;
    seg.labels = {0, 0, 0};
    seg.segment_count = 1;
    const std::vector<int> textons(3, 0);
    auto stats = segment_stats(img, lab, seg, textons, 2);
    REQUIRE(stats.size() == 1);
    CHECK(stats[0].median_rgb == std::array<double, 3>{20, 30, 40});
    CHECK(stats[0].pixel_count == 3);
    CHECK(stats[0].texton_hist == std::vector<double>{1.0, 0.0});

    // Two pixels: the upper median is the larger one.
    RasterImage img2(2, 1);
    img2.set(0, 0, 0, 0, 0);
    img2.set(1, 0, 10, 10, 10);
    SegmentMap seg2;
    seg2.width = 2;
    seg2.height = 1;
    seg2.labels = {0, 0};
    seg2.segment_count = 1;
    auto stats2 = segment_stats(img2, rgb_to_lab(img2), seg2, {0, 0}, 1);
    CHECK(stats2[0].median_rgb == std::array<double, 3>{10, 10, 10});

    // A uniform segment reproduces its color and its L.
    RasterImage img3(4, 1);
    for (int x = 0; x < 4; ++x) img3.set(x, 0, 60, 120, 180);
    SegmentMap seg3;
    seg3.width = 4;
    seg3.height = 1;
    seg3.labels = {0, 0, 0, 0};
    seg3.segment_count = 1;
    auto stats3 = segment_stats(img3, rgb_to_lab(img3), seg3, {0, 0, 0, 0}, 1);
    CHECK(stats3[0].median_rgb == std::array<double, 3>{60, 120, 180});
    CHECK(stats3[0].median_l ==
          doctest::Approx(srgb_to_lab(60, 120, 180)[0]).epsilon(1e-5));
}

TEST_CASE("uniform dimming gives a zero reflectance angle") {
    CHECK(reflectance_angle({100, 100, 100}, {50, 50, 50}) ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(reflectance_angle({200, 100, 50}, {100, 50, 25}) ==
          doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("the chroma-shifted counterexample lands near 27.2 degrees") {
    const double angle = reflectance_angle({100, 100, 100}, {90, 50, 50});
    CHECK(angle == doctest::Approx(27.2149).epsilon(1e-4));
    CHECK(angle > 10.0);  // rejected at the default threshold
}

TEST_CASE("angle is scale invariant along the dimming ray") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 1000; ++i) {
        std::array<double, 3> c = {1.0 + static_cast<double>(rng() % 255),
                                   1.0 + static_cast<double>(rng() % 255),
                                   1.0 + static_cast<double>(rng() % 255)};
        const double s = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
        const std::array<double, 3> dimmed = {s * c[0], s * c[1], s * c[2]};
        CHECK(std::abs(reflectance_angle(c, dimmed)) < 1e-9);
    }
}

TEST_CASE("degenerate angle inputs raise") {
    CHECK_THROWS_AS((void)reflectance_angle({50, 50, 50}, {50, 50, 50}), Error);
    CHECK_THROWS_AS((void)reflectance_angle({0, 0, 0}, {1, 1, 1}), Error);
    try {
        (void)reflectance_angle({50, 50, 50}, {50, 50, 50});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::degenerate_input);
    }
}

TEST_CASE("luminance grouping: one value, one region") {
    std::vector<SegmentStats> stats;
    for (int i = 0; i < 5; ++i) stats.push_back(make_stats(i, {100, 100, 100}, 50.0));
    const auto centers = luminance_regions(stats, ClassifierConfig{});
    CHECK(centers.size() == 1);
    for (const auto& s : stats) CHECK(s.luminance_region == 0);
}

TEST_CASE("luminance grouping: two well-separated clusters become two regions") {
    std::vector<SegmentStats> stats;
    int id = 0;
    for (double l : {29.0, 30.0, 31.0, 30.5, 29.5}) stats.push_back(make_stats(id++, {}, l));
    for (double l : {79.0, 80.0, 81.0, 80.5}) stats.push_back(make_stats(id++, {}, l));
    const auto centers = luminance_regions(stats, ClassifierConfig{});
    REQUIRE(centers.size() == 2);
    CHECK(centers[0] < centers[1]);
    for (int i = 0; i < 5; ++i) CHECK(stats[i].luminance_region == 0);
    for (int i = 5; i < 9; ++i) CHECK(stats[i].luminance_region == 1);
}

TEST_CASE("luminance grouping: single segment") {
    std::vector<SegmentStats> stats{make_stats(0, {}, 62.0)};
    const auto centers = luminance_regions(stats, ClassifierConfig{});
    CHECK(centers.size() == 1);
    CHECK(stats[0].luminance_region == 0);
}

TEST_CASE("luminance ratio and the strict 1.2 boundary") {
    const auto r = luminance_ratio(make_stats(0, {}, 80.0), make_stats(1, {}, 40.0));
    CHECK(r.t == doctest::Approx(2.0));
    CHECK(r.darker_id == 1);

    const auto eq = luminance_ratio(make_stats(0, {}, 33.0), make_stats(1, {}, 33.0));
    CHECK(eq.t == doctest::Approx(1.0));

    // 60/50 = 1.2 exactly: not strictly above the 1.2 threshold.
    const auto edge = luminance_ratio(make_stats(0, {}, 60.0), make_stats(1, {}, 50.0));
    const ClassifierConfig cfg;
    CHECK_FALSE(edge.t > cfg.ratio_min);

    CHECK_THROWS_AS((void)luminance_ratio(make_stats(0, {}, 0.1), make_stats(1, {}, 0.2)),
                    Error);

    // One near-black side caps the ratio instead of dividing by ~zero.
    const auto capped = luminance_ratio(make_stats(0, {}, 50.0), make_stats(1, {}, 0.0));
    CHECK(capped.t == doctest::Approx(1000.0));
}

TEST_CASE("an ideal dimmed copy is accepted with angle zero and T two") {
    auto bright = make_stats(0, {160, 120, 80}, 60.0, {0.5, 0.5}, 0);
    auto dark = make_stats(1, {80, 60, 40}, 30.0, {0.5, 0.5}, 1);
    const std::vector<double> ground = {0.0, 1.0, 1.0, 0.0};
    const auto v = classify_pair(bright, dark, ground, ClassifierConfig{});
    REQUIRE(v.accepted);
    CHECK(v.shadow_id == 1);
    CHECK(v.nonshadow_id == 0);
    CHECK(v.angle_deg == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(v.ratio_t == doctest::Approx(2.0));
    REQUIRE(v.emd_value.has_value());
    CHECK(*v.emd_value == doctest::Approx(0.0));
}

TEST_CASE("same-region pairs are rejected before anything is computed") {
    auto a = make_stats(0, {160, 120, 80}, 60.0, {1.0}, 2);
    auto b = make_stats(1, {80, 60, 40}, 30.0, {1.0}, 2);
    const auto v = classify_pair(a, b, kTrivialGround, ClassifierConfig{});
    CHECK_FALSE(v.accepted);
    CHECK(v.reject_reason == RejectReason::same_region);
    CHECK_FALSE(v.emd_value.has_value());
    CHECK_FALSE(v.emd_skipped_high_ratio);
    CHECK(v.ratio_t == 0.0);  // gate 2 never ran
}

TEST_CASE("high T skips the texture gate even with dissimilar histograms") {
    // T = 3 > 2.4; the distorted histogram would fail the EMD gate.
    auto bright = make_stats(0, {150, 150, 150}, 75.0, {1.0, 0.0}, 0);
    auto dark = make_stats(1, {50, 50, 50}, 25.0, {0.0, 1.0}, 1);
    const std::vector<double> ground = {0.0, 1.0, 1.0, 0.0};
    const auto v = classify_pair(bright, dark, ground, ClassifierConfig{});
    REQUIRE(v.accepted);
    CHECK(v.emd_skipped_high_ratio);
    CHECK_FALSE(v.emd_value.has_value());

    // Same histograms at T = 2 fail on texture instead.
    auto bright2 = make_stats(0, {150, 150, 150}, 50.0, {1.0, 0.0}, 0);
    auto dark2 = make_stats(1, {75, 75, 75}, 25.0, {0.0, 1.0}, 1);
    const auto v2 = classify_pair(bright2, dark2, ground, ClassifierConfig{});
    CHECK_FALSE(v2.accepted);
    CHECK(v2.reject_reason == RejectReason::texture);
    REQUIRE(v2.emd_value.has_value());
    CHECK(*v2.emd_value == doctest::Approx(1.0));
}

TEST_CASE("angle gate rejects different materials") {
    auto bright = make_stats(0, {100, 100, 100}, 60.0, {1.0}, 0);
    auto dark = make_stats(1, {90, 50, 50}, 30.0, {1.0}, 1);
    const auto v = classify_pair(bright, dark, kTrivialGround, ClassifierConfig{});
    CHECK_FALSE(v.accepted);
    CHECK(v.reject_reason == RejectReason::angle);
    CHECK(v.angle_deg > 10.0);
}

TEST_CASE("low ratio rejects before the angle gate") {
    auto a = make_stats(0, {100, 100, 100}, 55.0, {1.0}, 0);
    auto b = make_stats(1, {95, 95, 95}, 50.0, {1.0}, 1);
    const auto v = classify_pair(a, b, kTrivialGround, ClassifierConfig{});
    CHECK_FALSE(v.accepted);
    CHECK(v.reject_reason == RejectReason::low_ratio);
}

TEST_CASE("identical medians across regions reject as degenerate") {
    auto a = make_stats(0, {90, 90, 90}, 47.0, {1.0}, 0);
    auto b = make_stats(1, {90, 90, 90}, 30.0, {1.0}, 1);
    const auto v = classify_pair(a, b, kTrivialGround, ClassifierConfig{});
    CHECK_FALSE(v.accepted);
    CHECK(v.reject_reason == RejectReason::degenerate);
}

TEST_CASE("classify_pair is symmetric in argument order") {
    std::mt19937_64 rng(8);
    const std::vector<double> ground = {0.0, 1.0, 1.0, 0.0};
    for (int i = 0; i < 200; ++i) {
        const bool peaked = (rng() % 2) != 0;
        auto a = make_stats(0,
                            {static_cast<double>(rng() % 256), static_cast<double>(rng() % 256),
                             static_cast<double>(rng() % 256)},
                            static_cast<double>(rng() % 1000) / 10.0,
                            peaked ? std::vector<double>{1.0, 0.0}
                                   : std::vector<double>{0.5, 0.5},
                            static_cast<int>(rng() % 2));
        auto b = make_stats(1,
                            {static_cast<double>(rng() % 256), static_cast<double>(rng() % 256),
                             static_cast<double>(rng() % 256)},
                            static_cast<double>(rng() % 1000) / 10.0,
                            {0.5, 0.5}, static_cast<int>(rng() % 2));
        const auto ab = classify_pair(a, b, ground, ClassifierConfig{});
        const auto ba = classify_pair(b, a, ground, ClassifierConfig{});
        CHECK(ab.accepted == ba.accepted);
        CHECK(ab.reject_reason == ba.reject_reason);
        CHECK(ab.shadow_id == ba.shadow_id);
        CHECK(ab.nonshadow_id == ba.nonshadow_id);
        if (ab.accepted) {
            CHECK(ab.angle_deg == ba.angle_deg);
            CHECK(ab.ratio_t == ba.ratio_t);
        }
    }
}

TEST_CASE("accepted pairs always give the shadow role to the darker segment") {
    std::mt19937_64 rng(15);
    const std::vector<double> ground = {0.0, 1.0, 1.0, 0.0};
    for (int i = 0; i < 200; ++i) {
        const double base = 40.0 + static_cast<double>(rng() % 160);
        const double f = 0.3 + 0.5 * static_cast<double>(rng() % 100) / 100.0;
        auto bright = make_stats(0, {base, base, base}, srgb_to_lab(base, base, base)[0],
                                 {0.5, 0.5}, 0);
        auto dark = make_stats(1, {f * base, f * base, f * base},
                               srgb_to_lab(f * base, f * base, f * base)[0], {0.5, 0.5}, 1);
        const auto v = classify_pair(bright, dark, ground, ClassifierConfig{});
        if (v.accepted) {
            CHECK(v.shadow_id == 1);
            CHECK(v.ratio_t >= 1.0);
        }
    }
}
