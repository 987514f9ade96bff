#include <doctest.h>

#include <random>
#include <sstream>

#include "fusemap/vision.hpp"

using namespace fusemap;

namespace {

PlaneObservation random_plane(std::uint64_t seed, double density = 0.5) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(density);
    PlaneObservation obs;
    for (int g = 0; g < 64; ++g)
        for (int c = 0; c < 32; ++c)
            obs.set(g, c, coin(rng) ? CellState::one : CellState::zero);
    return obs;
}

int diff_count(const PlaneObservation& a, const PlaneObservation& b) {
    int n = 0;
    for (int g = 0; g < 64; ++g)
        for (int c = 0; c < 32; ++c)
            if (a.at(g, c) != b.at(g, c)) ++n;
    return n;
}

GrayImage translated(const GrayImage& img, int dx, int dy) {
    GrayImage out(img.width, img.height, img.at(0, 0));
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const int sx = x - dx, sy = y - dy;
            if (sx >= 0 && sx < img.width && sy >= 0 && sy < img.height)
                out.at(x, y) = img.at(sx, sy);
        }
    return out;
}

}  // namespace

TEST_CASE("pgm round trip and format errors") {
    GrayImage img(7, 5);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 7; ++x) img.at(x, y) = static_cast<std::uint8_t>(x * 30 + y);
    std::ostringstream out;
    write_pgm(img, out);
    std::istringstream in(out.str());
    const GrayImage back = read_pgm(in);
    CHECK(back.width == 7);
    CHECK(back.pixels == img.pixels);

    std::istringstream bad("P2\n2 2\n255\n0 0 0 0\n");
    CHECK_THROWS_AS(read_pgm(bad), ImageFormatError);
    std::istringstream truncated(out.str().substr(0, out.str().size() - 3));
    CHECK_THROWS_AS(read_pgm(truncated), ImageFormatError);
}

TEST_CASE("one-hot synthesis has a single intensity maximum") {
    PlaneObservation obs;  // all zero
    obs.set(10, 7, CellState::one);
    SynthParams params;
    params.noise_sigma = 0.0;
    params.charge_gradient = 0.0;
    const GrayImage img = synth_plane_image(obs, params);
    int best_x = 0, best_y = 0;
    std::uint8_t best = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (img.at(x, y) > best) {
                best = img.at(x, y);
                best_x = x;
                best_y = y;
            }
    const double cx = params.margin + 7.5 * params.pitch;
    const double cy = params.margin + 10.5 * params.pitch;
    CHECK(std::abs(best_x - cx) < params.pitch / 2);
    CHECK(std::abs(best_y - cy) < params.pitch / 2);
    // every other strong pixel belongs to the same blob
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (img.at(x, y) > (params.bright_mean + params.dark_mean) / 2) {
                CHECK(std::abs(x - cx) < params.pitch);
                CHECK(std::abs(y - cy) < params.pitch);
            }
}

TEST_CASE("synthetic site intensities are bimodal at the configured means") {
    const PlaneObservation obs = random_plane(1);
    SynthParams params;
    params.noise_sigma = 0.0;
    const GrayImage img = synth_plane_image(obs, params);
    double bright_sum = 0, dark_sum = 0;
    int bright_n = 0, dark_n = 0;
    for (int g = 0; g < 64; ++g)
        for (int c = 0; c < 32; ++c) {
            const int x = static_cast<int>(params.margin + (c + 0.5) * params.pitch);
            const int y = static_cast<int>(params.margin + (g + 0.5) * params.pitch);
            if (obs.at(g, c) == CellState::one) {
                bright_sum += img.at(x, y);
                ++bright_n;
            } else {
                dark_sum += img.at(x, y);
                ++dark_n;
            }
        }
    const double bright = bright_sum / bright_n;
    const double dark = dark_sum / dark_n;
    CHECK(bright == doctest::Approx(params.bright_mean).epsilon(0.05));
    CHECK(dark == doctest::Approx(params.dark_mean).epsilon(0.05));
    CHECK(bright - dark >= 100.0);
}

TEST_CASE("fit_grid recovers pitch and origin") {
    SynthParams params;
    params.pitch = 20.0;
    params.noise_sigma = 2.0;
    const GrayImage img = synth_plane_image(random_plane(2), params);
    const GridModel grid = fit_grid(img, 64, 32);
    CHECK(grid.pitch_x == doctest::Approx(20.0).epsilon(0.025));
    CHECK(grid.pitch_y == doctest::Approx(20.0).epsilon(0.025));
    CHECK(std::abs(grid.origin_x - (params.margin + 0.5 * 20.0)) < 0.5);
    CHECK(std::abs(grid.origin_y - (params.margin + 0.5 * 20.0)) < 0.5);
}

TEST_CASE("fit_grid rejects a uniform image") {
    GrayImage img(200, 200, 90);
    CHECK_THROWS_AS(fit_grid(img, 64, 32), GridNotFoundError);
}

TEST_CASE("fit_grid is translation equivariant") {
    SynthParams params;
    const GrayImage img = synth_plane_image(random_plane(3), params);
    const GridModel base = fit_grid(img, 64, 32);
    const GridModel moved = fit_grid(translated(img, 3, 5), 64, 32);
    CHECK(std::abs(moved.origin_x - base.origin_x - 3.0) < 0.5);
    CHECK(std::abs(moved.origin_y - base.origin_y - 5.0) < 0.5);
    CHECK(moved.pitch_x == doctest::Approx(base.pitch_x).epsilon(0.01));
    CHECK(moved.pitch_y == doctest::Approx(base.pitch_y).epsilon(0.01));
}

TEST_CASE("classify separates constructed classes") {
    // lattice of alternating 180/60 blobs on a dark background
    GridModel grid{10.0, 10.0, 12.0, 12.0, 8, 8};
    GrayImage img(110, 110, 30);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) {
            const std::uint8_t v = (r + c) % 2 ? 180 : 60;
            // blob larger than the pitch/4 sampling disc, so means are exact
            for (int dy = -3; dy <= 3; ++dy)
                for (int dx = -3; dx <= 3; ++dx)
                    img.at(static_cast<int>(grid.origin_x) + c * 12 + dx,
                           static_cast<int>(grid.origin_y) + r * 12 + dy) = v;
        }
    const ClassifiedGrid cg = classify(img, grid, 20.0);
    CHECK(cg.contrast == doctest::Approx(120.0).epsilon(0.05));
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c)
            CHECK(cg.value(r, c) == ((r + c) % 2 ? CellState::one : CellState::zero));
}

TEST_CASE("classify raises no-contrast on a uniform image") {
    GridModel grid{10.0, 10.0, 12.0, 12.0, 8, 8};
    GrayImage img(110, 110, 90);
    CHECK_THROWS_AS(classify(img, grid, 20.0), NoContrastError);
}

TEST_CASE("closed loop is exact at default parameters") {
    for (std::uint64_t seed = 10; seed < 15; ++seed) {
        const PlaneObservation obs = random_plane(seed);
        SynthParams params;
        params.seed = seed;
        const GrayImage img = synth_plane_image(obs, params);
        const PlaneObservation back = extract_plane(img, 0);
        CHECK(diff_count(back, obs) == 0);
    }
}

TEST_CASE("closed loop survives a 180-degree rotation with the flip flag") {
    const PlaneObservation obs = random_plane(20);
    const GrayImage img = synth_plane_image(obs, SynthParams{});
    GrayImage rotated(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            rotated.at(x, y) = img.at(img.width - 1 - x, img.height - 1 - y);
    ExtractOptions opts;
    opts.flip180 = true;
    CHECK(diff_count(extract_plane(rotated, 0, opts), obs) == 0);
}

TEST_CASE("flatten_background removes a linear ramp") {
    SynthParams clean;
    clean.noise_sigma = 0.0;
    SynthParams ramped = clean;
    ramped.charge_gradient = 60.0;
    const PlaneObservation obs = random_plane(4);
    const GrayImage flat_clean = flatten_background(synth_plane_image(obs, clean));
    const GrayImage flat_ramped = flatten_background(synth_plane_image(obs, ramped));
    double max_diff = 0.0;
    for (std::size_t i = 0; i < flat_clean.pixels.size(); ++i)
        max_diff = std::max(max_diff,
                            std::abs(static_cast<double>(flat_clean.pixels[i]) -
                                     flat_ramped.pixels[i]));
    CHECK(max_diff <= 6.0);  // ramp removal is exact up to rounding and clamping

    // a zero-gradient image only shifts by a constant; a checkerboard has no
    // intensity tilt of its own
    PlaneObservation checker;
    for (int g = 0; g < 64; ++g)
        for (int c = 0; c < 32; ++c)
            checker.set(g, c, (g + c) % 2 ? CellState::one : CellState::zero);
    const GrayImage img = synth_plane_image(checker, clean);
    const GrayImage flat = flatten_background(img);
    const int shift = static_cast<int>(flat.at(5, 5)) - static_cast<int>(img.at(5, 5));
    for (int y = 10; y < img.height - 10; y += 17)
        for (int x = 10; x < img.width - 10; x += 13)
            CHECK(std::abs(static_cast<int>(flat.at(x, y)) - static_cast<int>(img.at(x, y)) -
                           shift) <= 1);
}

TEST_CASE("charging ramp ablation") {
    const PlaneObservation obs = random_plane(5);
    SynthParams params;
    params.charge_gradient = 100.0;
    const GrayImage img = synth_plane_image(obs, params);

    ExtractOptions with_flatten;
    CHECK(diff_count(extract_plane(img, 0, with_flatten), obs) == 0);

    ExtractOptions without;
    without.flatten = false;
    bool failed = false;
    try {
        failed = diff_count(extract_plane(img, 0, without), obs) > 0;
    } catch (const Error&) {
        failed = true;
    }
    CHECK(failed);
}

TEST_CASE("uniform plane extraction needs the explicit override") {
    PlaneObservation ones;
    for (int g = 0; g < 64; ++g)
        for (int c = 0; c < 32; ++c) ones.set(g, c, CellState::one);
    const GrayImage img = synth_plane_image(ones, SynthParams{});
    CHECK_THROWS_AS(extract_plane(img, 0), Error);
    ExtractOptions opts;
    opts.assume_uniform = true;
    CHECK(diff_count(extract_plane(img, 0, opts), ones) == 0);

    PlaneObservation zeros;
    const GrayImage dark = synth_plane_image(zeros, SynthParams{});
    CHECK(diff_count(extract_plane(dark, 0, opts), zeros) == 0);
}

TEST_CASE("synthesis parameter validation") {
    SynthParams bad;
    bad.bright_mean = 50;
    bad.dark_mean = 60;
    CHECK_THROWS_AS(synth_plane_image(PlaneObservation{}, bad), ParameterError);
    PlaneObservation with_unknown;
    with_unknown.set(0, 0, CellState::unknown);
    CHECK_THROWS_AS(synth_plane_image(with_unknown, SynthParams{}), ParameterError);
}
