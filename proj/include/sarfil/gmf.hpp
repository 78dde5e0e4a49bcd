#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sarfil/grid.hpp"

namespace sarfil {

enum class Polarization { VV, HH };

Polarization parse_polarization(const std::string& s);
std::string polarization_name(Polarization p);

// VV/HH polarization ratio as a tabulated function of incidence angle,
// linearly interpolated and clamped at the table ends.
struct PolRatioTable {
    std::vector<double> incidence_deg;  // strictly increasing
    std::vector<double> ratio;          // > 0

    double at(double inc_deg) const;
    bool empty() const { return incidence_deg.empty(); }
};

// A C-band geophysical model function: named coefficient set plus the
// polarization ratio used to convert the VV model value to HH.
struct GmfSpec {
    std::string name;                // e.g. "CMOD5"
    std::vector<double> coeffs;
    PolRatioTable pol_ratio;
};

// Coefficient file: header line naming the model, then one real per line.
// Polarization ratio table: CSV of (incidence_deg, ratio).
GmfSpec load_gmf(const std::string& coeff_path, const std::string& pol_ratio_path);

// Model backscatter (linear units). rel_azimuth_deg is the angle between
// the wind direction and the radar look direction: 0 = wind toward the
// radar (upwind), 90 = crosswind. Inputs outside the model envelope
// (wind 0.2-50 m/s, incidence 15-60 deg) are clamped; when `clamped` is
// given it is incremented per clamped evaluation.
double gmf_sigma0(const GmfSpec& gmf, double wind_speed, double rel_azimuth_deg,
                  double incidence_deg, Polarization pol,
                  std::size_t* clamped = nullptr);

// Per-pixel viewing geometry of one scene.
struct SceneGeometry {
    Grid incidence;                 // degrees
    double track_heading_deg = 0.0; // clockwise from north
    double look_direction_deg = 90.0; // perpendicular to track
};

// Throws DataError when incidence leaves [15, 60] or headings leave [0, 360).
void validate_geometry(const SceneGeometry& geom);

struct MaskBounds {
    Grid lo;
    Grid hi;
};

// Preliminary backscatter bounds: lo from a weak wind blowing parallel to
// the track (crosswind to the look direction), hi from a strong wind blowing
// toward the satellite (upwind).
MaskBounds mask_bounds(const GmfSpec& gmf, const SceneGeometry& geom,
                       Polarization pol, double lo_wind = 1.0,
                       double hi_wind = 15.0);

// Pixels with sigma0 outside [lo, hi] become invalid; others pass through.
Grid apply_mask(const Grid& sigma0, const Grid& lo, const Grid& hi);

} // namespace sarfil
