#include <doctest.h>

#include <cmath>
#include <fstream>

#include "sarfil/error.hpp"
#include "sarfil/gmf.hpp"
#include "test_util.hpp"

using namespace sarfil;

TEST_SUITE_BEGIN("gmf");

namespace {

const GmfSpec& gmf() {
    static const GmfSpec spec =
        load_gmf(testutil::data_path("cmod5.coef"), testutil::data_path("polratio.csv"));
    return spec;
}

Grid uniform_incidence(int nrows, int ncols, double deg) {
    Grid g(nrows, ncols, 800.0, 48.0, -63.0);
    for (auto& v : g.values) v = deg;
    return g;
}

} // namespace

TEST_CASE("coefficient file loads the named model with full arity") {
    CHECK(gmf().name == "CMOD5");
    CHECK(gmf().coeffs.size() == 28);
    CHECK(gmf().coeffs[0] == -0.688);
    CHECK(gmf().coeffs[27] == 1.53);
}

TEST_CASE("missing coefficient file is a configuration error") {
    CHECK_THROWS_AS(load_gmf("/nonexistent/path.coef", testutil::data_path("polratio.csv")),
                    ConfigError);
    CHECK_THROWS_AS(load_gmf(testutil::data_path("cmod5.coef"), "/nonexistent/pr.csv"),
                    ConfigError);
}

TEST_CASE("truncated coefficient sets are rejected") {
    const std::string dir = testutil::scratch_dir("gmf_arity");
    std::ofstream bad(dir + "/bad.coef");
    bad << "CMOD5\n1.0\n2.0\n";
    bad.close();
    CHECK_THROWS_AS(load_gmf(dir + "/bad.coef", testutil::data_path("polratio.csv")),
                    ConfigError);
}

TEST_CASE("library evaluation matches the reference transliteration to 1e-10") {
    for (double v : {1.0, 2.0, 5.0, 7.5, 10.0, 15.0}) {
        for (double phi : {0.0, 30.0, 45.0, 90.0, 135.0, 180.0, 270.0}) {
            for (double theta : {20.0, 25.0, 32.0, 40.0, 49.0}) {
                const double ours = gmf_sigma0(gmf(), v, phi, theta, Polarization::VV);
                const double ref = testutil::cmod5_reference(gmf().coeffs, v, phi, theta);
                CHECK(std::abs(ours - ref) <= 1e-10 * std::abs(ref));
            }
        }
    }
}

TEST_CASE("backscatter increases with wind speed at fixed geometry") {
    const double weak = gmf_sigma0(gmf(), 2.0, 45.0, 35.0, Polarization::VV);
    const double strong = gmf_sigma0(gmf(), 10.0, 45.0, 35.0, Polarization::VV);
    CHECK(weak < strong);

    for (double theta : {20.0, 35.0, 49.0}) {
        for (double phi : {0.0, 45.0, 90.0, 135.0, 180.0}) {
            double prev = 0.0;
            for (double v = 1.0; v <= 15.0; v += 0.5) {
                const double s = gmf_sigma0(gmf(), v, phi, theta, Polarization::VV);
                CHECK(s > prev);
                prev = s;
            }
        }
    }
}

TEST_CASE("upwind returns at least the crosswind value") {
    for (double theta : {20.0, 35.0, 49.0}) {
        const double up = gmf_sigma0(gmf(), 5.0, 0.0, theta, Polarization::VV);
        const double cross = gmf_sigma0(gmf(), 5.0, 90.0, theta, Polarization::VV);
        CHECK(up >= cross);
    }
}

TEST_CASE("HH equals VV divided by the polarization ratio, exactly") {
    for (double theta : {21.0, 30.5, 42.0, 48.0}) {
        for (double v : {2.0, 6.0, 12.0}) {
            const double vv = gmf_sigma0(gmf(), v, 30.0, theta, Polarization::VV);
            const double hh = gmf_sigma0(gmf(), v, 30.0, theta, Polarization::HH);
            CHECK(hh == vv / gmf().pol_ratio.at(theta));
        }
    }
}

TEST_CASE("polarization ratio is positive across the working range") {
    for (double theta = 20.0; theta <= 49.0; theta += 0.25)
        CHECK(gmf().pol_ratio.at(theta) > 0.0);
}

TEST_CASE("out-of-envelope inputs are clamped and counted") {
    std::size_t clamped = 0;
    const double at_min = gmf_sigma0(gmf(), 0.05, 0.0, 35.0, Polarization::VV, &clamped);
    CHECK(clamped == 1);
    CHECK(at_min == gmf_sigma0(gmf(), 0.2, 0.0, 35.0, Polarization::VV));
    gmf_sigma0(gmf(), 5.0, 0.0, 70.0, Polarization::VV, &clamped);
    CHECK(clamped == 2);
    gmf_sigma0(gmf(), 5.0, 0.0, 35.0, Polarization::VV, &clamped);
    CHECK(clamped == 2);
}

TEST_CASE("mask bounds satisfy lo < hi everywhere") {
    SceneGeometry geom;
    geom.incidence = uniform_incidence(4, 32, 0.0);
    for (int j = 0; j < 32; ++j) {
        const double theta = 20.0 + (49.0 - 20.0) * j / 31.0;
        for (int i = 0; i < 4; ++i) geom.incidence.at(i, j) = theta;
    }
    geom.track_heading_deg = 190.0;
    geom.look_direction_deg = 280.0;
    for (Polarization pol : {Polarization::VV, Polarization::HH}) {
        const MaskBounds b = mask_bounds(gmf(), geom, pol);
        for (std::size_t k = 0; k < b.lo.size(); ++k) CHECK(b.lo.values[k] < b.hi.values[k]);
        // Range-monotone incidence gives range-monotone bounds.
        for (int j = 1; j < 32; ++j) {
            CHECK(b.lo.at(0, j) < b.lo.at(0, j - 1));
            CHECK(b.hi.at(0, j) < b.hi.at(0, j - 1));
        }
        // The reference transliteration agrees with the bound values.
        if (pol == Polarization::VV) {
            const double lo_ref = testutil::cmod5_reference(gmf().coeffs, 1.0, 90.0, 20.0);
            const double hi_ref = testutil::cmod5_reference(gmf().coeffs, 15.0, 0.0, 20.0);
            CHECK(b.lo.at(0, 0) == doctest::Approx(lo_ref).epsilon(1e-12));
            CHECK(b.hi.at(0, 0) == doctest::Approx(hi_ref).epsilon(1e-12));
        }
    }
}

TEST_CASE("uniform incidence gives uniform bounds") {
    SceneGeometry geom;
    geom.incidence = uniform_incidence(3, 3, 35.0);
    const MaskBounds b = mask_bounds(gmf(), geom, Polarization::VV);
    for (std::size_t k = 1; k < b.lo.size(); ++k) {
        CHECK(b.lo.values[k] == b.lo.values[0]);
        CHECK(b.hi.values[k] == b.hi.values[0]);
    }
}

TEST_CASE("geometry validation rejects out-of-range incidence") {
    SceneGeometry geom;
    geom.incidence = uniform_incidence(2, 2, 75.0);
    CHECK_THROWS_AS(mask_bounds(gmf(), geom, Polarization::VV), DataError);
    geom.incidence = uniform_incidence(2, 2, 35.0);
    geom.track_heading_deg = 360.0;
    CHECK_THROWS_AS(mask_bounds(gmf(), geom, Polarization::VV), DataError);
}

TEST_CASE("apply_mask invalidates out-of-bounds pixels and nothing else") {
    SceneGeometry geom;
    geom.incidence = uniform_incidence(2, 2, 35.0);
    const MaskBounds b = mask_bounds(gmf(), geom, Polarization::VV);
    Grid sigma0 = uniform_incidence(2, 2, 0.0);
    sigma0.at(0, 0) = b.lo.at(0, 0) / 2.0;                    // below
    sigma0.at(0, 1) = (b.lo.at(0, 1) + b.hi.at(0, 1)) / 2.0;  // inside
    sigma0.at(1, 0) = b.hi.at(1, 0) * 2.0;                    // above
    sigma0.at(1, 1) = b.lo.at(1, 1);                          // on the bound
    const Grid masked = apply_mask(sigma0, b.lo, b.hi);
    CHECK_FALSE(masked.is_valid(0, 0));
    CHECK(masked.is_valid(0, 1));
    CHECK(masked.at(0, 1) == sigma0.at(0, 1));
    CHECK_FALSE(masked.is_valid(1, 0));
    CHECK(masked.is_valid(1, 1));

    // Idempotent, and never converts invalid to valid.
    const Grid twice = apply_mask(masked, b.lo, b.hi);
    CHECK(twice.valid == masked.valid);
    CHECK(twice.values == masked.values);
}

TEST_CASE("a fully out-of-bounds scene masks to nothing") {
    SceneGeometry geom;
    geom.incidence = uniform_incidence(4, 4, 35.0);
    const MaskBounds b = mask_bounds(gmf(), geom, Polarization::VV);
    Grid sigma0 = uniform_incidence(4, 4, 1e6);
    const Grid masked = apply_mask(sigma0, b.lo, b.hi);
    for (std::size_t k = 0; k < masked.size(); ++k) CHECK_FALSE(masked.valid[k]);
}

TEST_CASE("apply_mask rejects unregistered grids") {
    SceneGeometry geom;
    geom.incidence = uniform_incidence(2, 2, 35.0);
    const MaskBounds b = mask_bounds(gmf(), geom, Polarization::VV);
    Grid other(3, 3, 800.0, 48.0, -63.0, 0.1);
    CHECK_THROWS_AS(apply_mask(other, b.lo, b.hi), DataError);
}

TEST_SUITE_END();
