#include <doctest.h>

#include <cmath>

#include "sarfil/error.hpp"
#include "sarfil/grid.hpp"
#include "sarfil/rng.hpp"
#include "test_util.hpp"

using namespace sarfil;

TEST_SUITE_BEGIN("grid");

namespace {

Grid make_grid(int nrows, int ncols, std::initializer_list<double> vals,
               double pixel = 100.0) {
    Grid g(nrows, ncols, pixel, 48.0, -63.0);
    std::size_t k = 0;
    for (double v : vals) g.values[k++] = v;
    return g;
}

} // namespace

TEST_CASE("downsample averages a full 2x2 block") {
    const Grid g = make_grid(2, 2, {1.0, 2.0, 3.0, 4.0});
    const Grid d = downsample_halve(g);
    CHECK(d.nrows == 1);
    CHECK(d.ncols == 1);
    CHECK(d.at(0, 0) == 2.5);
    CHECK(d.is_valid(0, 0));
    CHECK(d.pixel_size_m == 200.0);
}

TEST_CASE("downsample keeps constant grids constant") {
    for (int n : {2, 3, 5, 8}) {
        Grid g(n, n, 100.0, 48.0, -63.0, 0.7300000000000001);
        const Grid d = downsample_halve(g);
        for (std::size_t k = 0; k < d.size(); ++k) {
            CHECK(d.valid[k]);
            CHECK(d.values[k] == 0.7300000000000001);
        }
    }
}

TEST_CASE("downsample averages only the valid children") {
    Grid g = make_grid(2, 2, {1.0, 0.0, 3.0, 0.0});
    g.valid[1] = 0;
    g.valid[3] = 0;
    const Grid d = downsample_halve(g);
    CHECK(d.is_valid(0, 0));
    CHECK(d.at(0, 0) == 2.0);

    // Matches the scalar block oracle on random masked grids.
    SplitMix64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const Grid r = testutil::random_grid(rng, 9, 7, 100.0, 0.3);
        const Grid dr = downsample_halve(r);
        for (int i = 0; i < dr.nrows; ++i) {
            for (int j = 0; j < dr.ncols; ++j) {
                const auto oracle = testutil::block_mean_oracle(r, i, j);
                CHECK(dr.is_valid(i, j) == oracle.valid);
                if (oracle.valid) CHECK(dr.at(i, j) == doctest::Approx(oracle.value).epsilon(1e-15));
            }
        }
    }
}

TEST_CASE("all-invalid blocks become invalid pixels") {
    Grid g = make_grid(2, 2, {1.0, 2.0, 3.0, 4.0});
    for (auto& v : g.valid) v = 0;
    const Grid d = downsample_halve(g);
    CHECK_FALSE(d.is_valid(0, 0));
}

TEST_CASE("downsample shifts the origin by half a parent pixel") {
    const Grid g = make_grid(2, 2, {1.0, 2.0, 3.0, 4.0});
    const Grid d = downsample_halve(g);
    CHECK(d.origin_lat == doctest::Approx(48.0 - 50.0 / kMetersPerDegree).epsilon(1e-15));
    const double cos_lat = std::cos(48.0 * 0.017453292519943295);
    CHECK(d.origin_lon ==
          doctest::Approx(-63.0 + 50.0 / (kMetersPerDegree * cos_lat)).epsilon(1e-15));
}

TEST_CASE("pyramid from a 128x128 base at 100 m reaches 12800 m in 8 levels") {
    SplitMix64 rng(7);
    const Grid g = testutil::random_grid(rng, 128, 128, 100.0);
    const Pyramid p = build_pyramid(g, 8);
    REQUIRE(p.levels.size() == 8);
    CHECK(p.levels.back().nrows == 1);
    CHECK(p.levels.back().ncols == 1);
    CHECK(p.levels.back().pixel_size_m == 12800.0);
    for (std::size_t k = 1; k < p.levels.size(); ++k)
        CHECK(p.levels[k].pixel_size_m == 2.0 * p.levels[k - 1].pixel_size_m);
}

TEST_CASE("single-level pyramid is the input") {
    const Grid g = make_grid(2, 2, {1.0, 2.0, 3.0, 4.0});
    const Pyramid p = build_pyramid(g, 1);
    REQUIRE(p.levels.size() == 1);
    CHECK(p.levels[0].values == g.values);
}

TEST_CASE("odd dimensions ceil-halve") {
    SplitMix64 rng(11);
    const Grid g = testutil::random_grid(rng, 3, 3, 100.0);
    const Pyramid p = build_pyramid(g, 2);
    CHECK(p.levels[1].nrows == 2);
    CHECK(p.levels[1].ncols == 2);
}

TEST_CASE("too many levels exhausts the pyramid") {
    SplitMix64 rng(13);
    const Grid g = testutil::random_grid(rng, 4, 4, 100.0);
    CHECK_NOTHROW(build_pyramid(g, 3));
    CHECK_THROWS_AS(build_pyramid(g, 4), DataError);
}

TEST_CASE("contrast of sigma0 0.02 against background 0.01 is 1") {
    Grid fine = make_grid(2, 2, {0.02, 0.02, 0.02, 0.02});
    Grid coarse = make_grid(1, 1, {0.01}, 200.0);
    const Grid c = contrast(fine, coarse);
    for (std::size_t k = 0; k < c.size(); ++k) {
        CHECK(c.valid[k]);
        CHECK(c.values[k] == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("contrast of a grid against itself is zero") {
    SplitMix64 rng(17);
    Grid g = testutil::random_grid(rng, 8, 8, 800.0);
    for (auto& v : g.values) v += 0.01;  // keep positive
    const Grid c = contrast(g, g);
    for (std::size_t k = 0; k < c.size(); ++k) {
        CHECK(c.valid[k]);
        CHECK(c.values[k] == 0.0);
    }
}

TEST_CASE("nonpositive background invalidates contrast pixels") {
    Grid fine = make_grid(2, 2, {0.02, 0.02, 0.02, 0.02});
    Grid coarse = make_grid(1, 1, {0.0}, 200.0);
    const Grid c = contrast(fine, coarse);
    for (std::size_t k = 0; k < c.size(); ++k) CHECK_FALSE(c.valid[k]);
}

TEST_CASE("contrast rejects unregistered geometries") {
    Grid fine = make_grid(2, 2, {1.0, 1.0, 1.0, 1.0});
    Grid bad_ratio = make_grid(1, 1, {1.0}, 300.0);
    CHECK_THROWS_AS(contrast(fine, bad_ratio), DataError);
    Grid bad_dims = make_grid(2, 2, {1.0, 1.0, 1.0, 1.0}, 200.0);
    CHECK_THROWS_AS(contrast(fine, bad_dims), DataError);
}

TEST_CASE("mean preservation on fully valid even grids") {
    SplitMix64 rng(19);
    for (int n : {16, 64, 256}) {
        const Grid g = testutil::random_grid(rng, n, n, 100.0);
        const Grid d = downsample_halve(g);
        const double m0 = testutil::grid_mean_valid(g);
        const double m1 = testutil::grid_mean_valid(d);
        CHECK(std::abs(m1 - m0) <= 1e-12 * std::abs(m0));
    }
}

TEST_CASE("replicate then re-average recovers the coarse grid exactly") {
    SplitMix64 rng(23);
    const Grid coarse = testutil::random_grid(rng, 16, 16, 1600.0);
    Grid fine_geom(32, 32, 800.0, coarse.origin_lat, coarse.origin_lon);
    const Grid replicated = block_replicate(coarse, fine_geom);
    const Grid averaged = downsample_halve(replicated);
    REQUIRE(averaged.same_shape(coarse));
    for (std::size_t k = 0; k < coarse.size(); ++k)
        CHECK(averaged.values[k] == coarse.values[k]);
}

TEST_CASE("SGRD round trip preserves values, mask, and header") {
    const std::string dir = testutil::scratch_dir("grid_sgrd");
    SplitMix64 rng(29);
    Grid g = testutil::random_grid(rng, 12, 9, 800.0, 0.2);
    // float32 payload: store representable values
    for (auto& v : g.values) v = static_cast<float>(v);
    const std::string path = dir + "/g.sgrd";
    write_sgrd(g, path);
    const Grid r = read_sgrd(path);
    CHECK(r.nrows == g.nrows);
    CHECK(r.ncols == g.ncols);
    CHECK(r.pixel_size_m == g.pixel_size_m);
    CHECK(r.origin_lat == g.origin_lat);
    CHECK(r.origin_lon == g.origin_lon);
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(r.valid[k] == (g.valid[k] != 0 ? 1 : 0));
        if (g.valid[k]) CHECK(r.values[k] == g.values[k]);
    }

    // Bit-exact header layout.
    const std::string bytes = testutil::read_bytes(path);
    REQUIRE(bytes.size() == 37 + g.size() * 4);
    CHECK(bytes.substr(0, 4) == "SGRD");
    CHECK(bytes[4] == 0x01);
    CHECK(static_cast<unsigned char>(bytes[5]) == 9);  // ncols LE
    CHECK(static_cast<unsigned char>(bytes[9]) == 12); // nrows LE
}

TEST_CASE("PGM export writes a sidecar with the scaling") {
    const std::string dir = testutil::scratch_dir("grid_pgm");
    Grid g = make_grid(2, 2, {0.0, 0.25, 0.5, 1.0});
    write_pgm(g, dir + "/g.pgm");
    const std::string bytes = testutil::read_bytes(dir + "/g.pgm");
    CHECK(bytes.substr(0, 3) == "P5\n");
    CHECK(static_cast<unsigned char>(bytes[bytes.size() - 1]) == 255);
    const std::string sidecar = testutil::read_bytes(dir + "/g.pgm.txt");
    CHECK(sidecar.find("value_max 1") != std::string::npos);
}

TEST_SUITE_END();
