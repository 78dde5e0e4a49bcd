#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sarfil/filament.hpp"
#include "sarfil/gmf.hpp"
#include "sarfil/grid.hpp"
#include "sarfil/stats.hpp"

namespace sarfil {

// Ground-truth generator parameters. The seed fully determines the output;
// the generator is SplitMix64 with per-sample substreams.
struct GenSpec {
    std::uint64_t seed = 1;

    // Series parameters.
    std::size_t n = 1000;
    double b = 0.5;          // true beta_U * sigma_t^2
    double sigma_t2 = 1.0;
    double sigma_eps2 = 0.0;
    double sigma_c2 = 0.0;
    double sigma_u2 = 0.0;
    double alpha_u = 0.0;
    double omega = 0.3;      // radians/hour

    // Scene parameters.
    int scene_nrows = 512;
    int scene_ncols = 512;
    double base_pixel_m = 100.0;
    double origin_lat = 48.5;
    double origin_lon = -63.5;
    int filament_count = 1;
    double filament_width_m = 2400.0;
    double filament_length_m = 20000.0;
    double filament_orientation_deg = 30.0;
    double filament_curvature = 0.0;     // radians per meter of arc length
    double filament_contrast = 0.9;      // magnitude at the 6 m/s reference
    double scene_wind = 6.0;             // m/s
    double scene_incidence_deg = 35.0;
    double scene_rel_azimuth_deg = 90.0;
    double speckle_sigma = 0.0;          // lognormal sigma; 0 = off

    // GMF inputs for scene backgrounds (used by drivers that own no RunConfig).
    std::string gmf_coeff_path;
    std::string pol_ratio_path;
};

// Key-value text config ("key = value", '#' comments).
GenSpec load_genspec(const std::string& path);

// Draws each overpass sample from an independent wavelike signal segment
//   t(tau) = a cos(omega tau) + b sin(omega tau),  a, b ~ N(0, sigma_t^2)
// (population autocorrelation exactly cos(omega tau)), plus white shared
// noise eps and unshared eps_C / eps_U, then emits
//   C    = t(0) + eps(0) + eps_C
//   U(k) = alpha_U + beta_U t(k delta) + eps(k delta) + eps_U(k delta).
PairedSeries gen_model_series(const GenSpec& g, int delta_h);
PairedSeries gen_model_series(const GenSpec& g, const std::vector<int>& deltas);

// Population Pearson correlation implied by the spec parameters.
double population_pearson(const GenSpec& g);

// Synthetic scene: GMF background at the scene wind, optional multiplicative
// speckle, and curvilinear strips whose contrast magnitude scales as
// (U/6)^-0.8. The truth field lives at 800-m resolution; a truth pixel is
// one whose fine-level children are all inside a strip.
struct SceneTruth {
    Grid sigma0;          // base resolution
    FilamentField truth;  // 800-m resolution
    Grid wind;            // 800-m resolution, uniform scene wind
};
SceneTruth gen_scene(const GenSpec& g, const GmfSpec& gmf);

} // namespace sarfil
