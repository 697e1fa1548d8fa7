#include <doctest.h>

#include <array>
#include <random>

#include "error.hpp"
#include "raster.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace umbra;
using namespace umbra::testing;

TEST_CASE("png round trip preserves pixels") {
    TempDir dir("raster");
    RasterImage img(2, 2);
    img.set(0, 0, 255, 0, 0);
    img.set(1, 0, 0, 255, 0);
    img.set(0, 1, 0, 0, 255);
    img.set(1, 1, 10, 20, 30);
    const std::string path = dir.file("roundtrip.png");
    save_png(img, path);
    const RasterImage back = load_image(path);
    CHECK(back == img);
}

TEST_CASE("single red pixel survives encode and decode") {
    TempDir dir("raster");
    RasterImage img(1, 1);
    img.set(0, 0, 255, 0, 0);
    const std::string path = dir.file("red.png");
    save_png(img, path);
    const RasterImage back = load_image(path);
    REQUIRE(back.width == 1);
    REQUIRE(back.height == 1);
    CHECK(back.pixels == std::vector<std::uint8_t>{255, 0, 0});
}

TEST_CASE("missing file reports file_not_found") {
    try {
        load_image("/nonexistent/umbra/input.png");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::file_not_found);
        CHECK(std::string(e.what()).find("/nonexistent/umbra/input.png") != std::string::npos);
    }
}

TEST_CASE("garbage bytes report unsupported_format") {
    TempDir dir("raster");
    const std::string path = dir.file("noise.png");
    {
        std::FILE* f = std::fopen(path.c_str(), "wb");
        REQUIRE(f != nullptr);
        std::fputs("definitely not an image", f);
        std::fclose(f);
    }
    try {
        load_image(path);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::unsupported_format);
    }
}

TEST_CASE("jpeg decodes to full-size rgb") {
    TempDir dir("raster");
    RasterImage img(32, 24);
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 32; ++x)
            img.set(x, y, 128, 128, 128);
    const std::string path = dir.file("flat.jpg");
    save_jpeg(img, path, 95);
    const RasterImage back = load_image(path);
    CHECK(back.width == 32);
    CHECK(back.height == 24);
    // Lossy, but a flat midtone should come back close.
    CHECK(std::abs(int(back.at(16, 12)[0]) - 128) <= 3);
}

TEST_CASE("lab conversion hits the reference points") {
    const auto white = srgb_to_lab(255, 255, 255);
    CHECK(white[0] == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(std::abs(white[1]) < 0.01);
    CHECK(std::abs(white[2]) < 0.01);

    const auto black = srgb_to_lab(0, 0, 0);
    CHECK(black[0] == doctest::Approx(0.0));
    CHECK(black[1] == doctest::Approx(0.0));
    CHECK(black[2] == doctest::Approx(0.0));

    // Independent evaluation of the sRGB gamma + cube-root formulas gives
    // L = 53.5850 for the 128 gray.
    const auto mid = srgb_to_lab(128, 128, 128);
    CHECK(mid[0] == doctest::Approx(53.5850).epsilon(0.001));
}

TEST_CASE("lab L is strictly monotone over gray levels") {
    double prev = -1.0;
    for (int g = 0; g < 256; ++g) {
        const auto lab = srgb_to_lab(g, g, g);
        CHECK(lab[0] > prev);
        prev = lab[0];
    }
    CHECK(prev <= 100.0);
}

TEST_CASE("gray conversion uses bt601 weights") {
    RasterImage img(3, 1);
    img.set(0, 0, 255, 255, 255);
    img.set(1, 0, 0, 0, 0);
    img.set(2, 0, 100, 150, 200);
    const GrayImage gray = rgb_to_gray(img);
    CHECK(gray.pixels[0] == 255);
    CHECK(gray.pixels[1] == 0);
    CHECK(gray.pixels[2] == 141);  // round(29.9 + 88.05 + 22.8)
}

TEST_CASE("otsu picks the lowest maximizing level on a two-spike histogram") {
    std::array<std::uint64_t, 256> hist{};
    hist[10] = 500;
    hist[200] = 500;
    CHECK(otsu_threshold(hist) == 10);
    CHECK(otsu_exhaustive(hist) == 10);
}

TEST_CASE("otsu returns the constant level for a constant image") {
    GrayImage img(8, 8, 77);
    CHECK(otsu_threshold(img) == 77);
}

TEST_CASE("otsu stays within the image level range") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::array<std::uint64_t, 256> hist{};
        const int lo = static_cast<int>(rng() % 200);
        const int hi = lo + 1 + static_cast<int>(rng() % (255 - lo));
        for (int i = 0; i < 40; ++i) hist[lo + rng() % (hi - lo + 1)] += 1 + rng() % 100;
        hist[lo] += 1;
        hist[hi] += 1;
        const int t = otsu_threshold(hist);
        CHECK(t >= lo);
        CHECK(t <= hi);
    }
}

TEST_CASE("otsu matches the exhaustive oracle on random histograms") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        std::array<std::uint64_t, 256> hist{};
        const int modes = 1 + static_cast<int>(rng() % 4);
        for (int m = 0; m < modes; ++m) {
            const int center = static_cast<int>(rng() % 256);
            const int spread = 1 + static_cast<int>(rng() % 40);
            const int mass = 50 + static_cast<int>(rng() % 2000);
            std::normal_distribution<double> noise(center, spread);
            for (int i = 0; i < mass; ++i) {
                int v = static_cast<int>(std::lround(noise(rng)));
                if (v < 0) v = 0;
                if (v > 255) v = 255;
                ++hist[v];
            }
        }
        CHECK(otsu_threshold(hist) == otsu_exhaustive(hist));
    }
}

TEST_CASE("gray conversion is a pure per-pixel map") {
    RasterImage img(4, 3);
    std::mt19937_64 rng(3);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng());
    const GrayImage direct = rgb_to_gray(img);

    // Reversing the pixel order and converting commutes with the map.
    RasterImage reversed(4, 3);
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c)
            reversed.pixels[(n - 1 - i) * 3 + c] = img.pixels[i * 3 + c];
    const GrayImage back = rgb_to_gray(reversed);
    for (std::size_t i = 0; i < n; ++i) CHECK(back.pixels[n - 1 - i] == direct.pixels[i]);
}

TEST_CASE("gray mask png round trip") {
    TempDir dir("raster");
    GrayImage mask(3, 2);
    mask.pixels = {0, 255, 0, 255, 0, 255};
    const std::string path = dir.file("mask.png");
    save_gray_png(mask, path);
    const RasterImage back = load_image(path);  // gray replicates to rgb
    REQUIRE(back.width == 3);
    REQUIRE(back.height == 2);
    CHECK(back.at(1, 0)[0] == 255);
    CHECK(back.at(1, 0)[1] == 255);
    CHECK(back.at(0, 0)[0] == 0);
}
