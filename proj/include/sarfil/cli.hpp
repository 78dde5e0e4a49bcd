#pragma once

#include <string>
#include <vector>

#include "sarfil/collocate.hpp"
#include "sarfil/filament.hpp"
#include "sarfil/sweep.hpp"

namespace sarfil::cli {

// Key-value run configuration; every non-empty path key must exist on disk
// at load time.
struct RunConfig {
    std::string catalog_path;
    std::string sightings_path;
    std::string wind_path;
    std::string domains_path;
    std::string gmf_coeff_path;
    std::string pol_ratio_path;
    std::string out_dir = "out";

    AgreementParams agreement;
    SweepConfig sweep;
    GeoBounds sighting_bounds;

    int pyramid_levels = 8;
    bool apply_gmf_mask = true;
    double mask_lo_wind = 1.0;
    double mask_hi_wind = 15.0;
    double incidence_near = 20.0;
    double incidence_far = 49.0;

    double wind_min = 1.0;
    double wind_max = 10.0;
    double min_coverage_frac = 0.25;

    int season_start_month = 5, season_start_day = 15;
    int season_end_month = 8, season_end_day = 15;

    int workers = 4;
};

RunConfig load_run_config(const std::string& path);

// Entry point shared by main() and the test harness. args excludes the
// program name. Returns the process exit code: 0 success, 1 usage or
// configuration error, 2 data error. Errors print one "ERROR\t..." line.
int run_command(const std::vector<std::string>& args);

} // namespace sarfil::cli
