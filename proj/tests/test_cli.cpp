#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "detect.hpp"
#include "raster.hpp"
#include "support/synthetic.hpp"

using namespace umbra;
using namespace umbra::testing;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(UMBRA_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

// Three vertical stripes: bright anchor, a half-dim copy and a slightly
// darker copy that only touches the half-dim stripe. The second dim stripe
// needs a propagation round to link up.
RasterImage chain_image() {
    RasterImage img(120, 60);
    for (int y = 0; y < 60; ++y)
        for (int x = 0; x < 120; ++x) {
            if (x < 40)
                img.set(x, y, 200, 200, 200);
            else if (x < 80)
                img.set(x, y, 100, 100, 100);
            else
                img.set(x, y, 90, 90, 90);
        }
    return img;
}

std::size_t count_mask_pixels(const std::string& path) {
    const RasterImage mask = load_image(path);
    std::size_t on = 0;
    for (std::size_t i = 0; i < mask.pixel_count(); ++i)
        if (mask.pixels[i * 3] > 127) ++on;
    return on;
}

}  // namespace

TEST_CASE("cli: detect on a constant image writes an all-zero mask and exits 0") {
    TempDir dir("cli");
    RasterImage img(48, 48);
    for (auto& p : img.pixels) p = 150;
    save_png(img, dir.file("flat.png"));
    const std::string mask_path = dir.file("mask.png");
    CHECK(run_cli("detect " + dir.file("flat.png") + " --mask-out " + mask_path) == 0);
    CHECK(count_mask_pixels(mask_path) == 0);
}

TEST_CASE("cli: usage errors exit 2") {
    CHECK(run_cli("") == 2);
    CHECK(run_cli("detect") == 2);                  // missing required arguments
    CHECK(run_cli("frobnicate in.png") == 2);       // unknown subcommand
    CHECK(run_cli("detect in.png --mask-out m.png --no-such-flag 1") == 2);
}

TEST_CASE("cli: processing errors exit 1") {
    TempDir dir("cli");
    CHECK(run_cli("detect " + dir.file("missing.png") + " --mask-out " + dir.file("m.png")) == 1);
}

TEST_CASE("cli: eval on an empty images dir exits 1") {
    TempDir images("cli_img");
    TempDir truth("cli_gt");
    CHECK(run_cli("eval --images " + images.path().string() + " --truth " +
                  truth.path().string()) == 1);
}

TEST_CASE("cli: one propagation round finds fewer shadow pixels on the chain scene") {
    TempDir dir("cli");
    save_png(chain_image(), dir.file("chain.png"));
    const std::string one = dir.file("mask1.png");
    const std::string full = dir.file("mask3.png");
    const std::string flags = " --gray-limit fixed:150 ";
    CHECK(run_cli("detect " + dir.file("chain.png") + flags + "--iterations 1 --mask-out " +
                  one) == 0);
    CHECK(run_cli("detect " + dir.file("chain.png") + flags + "--mask-out " + full) == 0);
    const std::size_t count_one = count_mask_pixels(one);
    const std::size_t count_full = count_mask_pixels(full);
    CHECK(count_one > 0);
    CHECK(count_full > count_one);
    // The extra stripe is 40x60 pixels.
    CHECK(count_full - count_one == 40 * 60);
}

TEST_CASE("cli: repeated runs and differing job counts give byte-identical outputs") {
    TempDir dir("cli");
    const ShadowScene scene = make_half_plane_scene(96, 64, {160, 140, 120}, 0.5, 0, 61);
    save_png(scene.dimmed, dir.file("scene.png"));

    const std::string m1 = dir.file("m1.png"), m2 = dir.file("m2.png"),
                      m8 = dir.file("m8.png");
    CHECK(run_cli("detect " + dir.file("scene.png") + " --jobs 1 --mask-out " + m1) == 0);
    CHECK(run_cli("detect " + dir.file("scene.png") + " --jobs 1 --mask-out " + m2) == 0);
    CHECK(run_cli("detect " + dir.file("scene.png") + " --jobs 8 --mask-out " + m8) == 0);
    CHECK(slurp(m1) == slurp(m2));
    CHECK(slurp(m1) == slurp(m8));

    const std::string r1 = dir.file("r1.png"), r8 = dir.file("r8.png");
    CHECK(run_cli("remove " + dir.file("scene.png") + " --jobs 1 --out " + r1) == 0);
    CHECK(run_cli("remove " + dir.file("scene.png") + " --jobs 8 --out " + r8) == 0);
    CHECK(slurp(r1) == slurp(r8));
}

TEST_CASE("cli: eval writes a report and respects --jobs for byte identity") {
    TempDir images("cli_img");
    TempDir truth("cli_gt");
    TempDir out("cli_out");
    for (int i = 0; i < 3; ++i) {
        const ShadowScene scene = make_half_plane_scene(
            96, 64, {{160, 140, 120}}, 0.5, i, 70 + i);
        const std::string name = "img" + std::to_string(i) + ".png";
        save_png(scene.dimmed, images.file(name));
        save_gray_png(mask_to_gray(scene.truth), truth.file(name));
    }
    const std::string rep1 = out.file("rep1.json"), rep8 = out.file("rep8.json");
    CHECK(run_cli("eval --images " + images.path().string() + " --truth " +
                  truth.path().string() + " --jobs 1 --report " + rep1) == 0);
    CHECK(run_cli("eval --images " + images.path().string() + " --truth " +
                  truth.path().string() + " --jobs 8 --report " + rep8) == 0);
    const std::string a = slurp(rep1), b = slurp(rep8);
    CHECK(a == b);
    CHECK(a.find("\"per_image\"") != std::string::npos);
}

TEST_CASE("cli: config file applies under inline flags") {
    TempDir dir("cli");
    RasterImage img(48, 48);
    for (auto& p : img.pixels) p = 150;
    save_png(img, dir.file("flat.png"));
    {
        std::ofstream cfg(dir.file("umbra.cfg"));
        cfg << "iterations = 2\n";
        cfg << "gray_limit = fixed:100\n";
    }
    // Bad config key fails fast.
    {
        std::ofstream cfg(dir.file("bad.cfg"));
        cfg << "iterationz = 2\n";
    }
    CHECK(run_cli("detect " + dir.file("flat.png") + " --config " + dir.file("umbra.cfg") +
                  " --mask-out " + dir.file("m.png")) == 0);
    CHECK(run_cli("detect " + dir.file("flat.png") + " --config " + dir.file("bad.cfg") +
                  " --mask-out " + dir.file("m.png")) == 1);
}

TEST_CASE("cli: segment subcommand writes previews and the texton map") {
    TempDir dir("cli");
    const ShadowScene scene = make_half_plane_scene(64, 48, {140, 160, 180}, 0.5, 0, 62);
    save_png(scene.dimmed, dir.file("scene.png"));
    const std::string out = dir.file("seg.png");
    const std::string textons = dir.file("textons.png");
    CHECK(run_cli("segment " + dir.file("scene.png") + " --sigma 3 --out " + out +
                  " --texton-out " + textons) == 0);
    const RasterImage preview = load_image(out);
    CHECK(preview.width == 64);
    CHECK(preview.height == 48);
    const RasterImage tmap = load_image(textons);
    CHECK(tmap.width == 64);
    CHECK(tmap.height == 48);
}

TEST_CASE("cli: remove writes jpeg when asked") {
    TempDir dir("cli");
    const ShadowScene scene = make_half_plane_scene(96, 64, {160, 140, 120}, 0.5, 2, 63);
    save_png(scene.dimmed, dir.file("scene.png"));
    const std::string out = dir.file("relit.jpg");
    CHECK(run_cli("remove " + dir.file("scene.png") + " --out " + out) == 0);
    const std::string bytes = slurp(out);
    REQUIRE(bytes.size() > 3);
    CHECK(static_cast<unsigned char>(bytes[0]) == 0xff);  // JPEG SOI marker
    CHECK(static_cast<unsigned char>(bytes[1]) == 0xd8);
}

TEST_CASE("cli: report echoes the merged configuration") {
    TempDir images("cli_img");
    TempDir truth("cli_gt");
    TempDir out("cli_out");
    const ShadowScene scene = make_half_plane_scene(96, 64, {160, 140, 120}, 0.5, 2, 64);
    save_png(scene.dimmed, images.file("a.png"));
    save_gray_png(mask_to_gray(scene.truth), truth.file("a.png"));
    {
        std::ofstream cfg(out.file("eval.cfg"));
        cfg << "ratio_min = 1.3\n";
        cfg << "iterations = 2\n";
    }
    const std::string rep = out.file("rep.json");
    // Inline --iterations beats the file; the file's ratio_min survives.
    CHECK(run_cli("eval --images " + images.path().string() + " --truth " +
                  truth.path().string() + " --config " + out.file("eval.cfg") +
                  " --iterations 4 --report " + rep) == 0);
    const std::string json = slurp(rep);
    CHECK(json.find("\"ratio_min\": \"1.3\"") != std::string::npos);
    CHECK(json.find("\"iterations\": \"4\"") != std::string::npos);
}
