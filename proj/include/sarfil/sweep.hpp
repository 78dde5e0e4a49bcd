#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sarfil/grid.hpp"
#include "sarfil/stats.hpp"

namespace sarfil {

// Wind speed at which the contrast adjustment is neutral.
inline constexpr double kAdjustRefSpeed = 6.0;

// Exponents -5.0 .. 5.0 in steps of 0.1, zero excluded.
std::vector<double> default_x_grid();

struct SweepConfig {
    std::vector<double> x_grid = default_x_grid();
    std::vector<int> deltas = {1, 2, 5};
    double x_star = 0.8;
    double low_confidence_threshold = 0.2;
};

void validate_sweep_config(const SweepConfig& cfg);

// Dependence of C on U^x at one exponent. Correlations are stored as
// magnitudes; model components are absent where no solution exists.
struct SweepPoint {
    double x = 0.0;
    double abs_pearson = 0.0;
    double dcor = 0.0;
    struct Component {
        double lin = 0.0;     // |beta_U sigma_t^2| / sqrt(varC varU)
        double nonlin = 0.0;  // sigma_eps^2 / sqrt(varC varU)
    };
    std::map<int, std::optional<Component>> components;  // keyed by delta_h
};

struct ArgmaxRecord {
    double x = 0.0;
    double value = 0.0;
};

struct DependenceReport {
    std::vector<SweepPoint> points;
    ArgmaxRecord max_abs_pearson;
    ArgmaxRecord max_dcor;
    std::map<int, std::optional<ArgmaxRecord>> max_lin;
    std::map<int, std::optional<ArgmaxRecord>> max_nonlin;
    double x_star = 0.8;
    bool low_confidence = false;  // max |pearson| under the threshold
};

// Correlates C against U^x across the exponent grid; the power is applied
// to U and to every lagged sample before the measurement-model solve.
DependenceReport sweep_exponent(const PairedSeries& s, const SweepConfig& cfg);

// Columns: x, abs_pearson, dcor, then lin_d<delta>, nonlin_d<delta> per
// configured delta; unavailable solutions leave empty cells.
void write_report_csv(const DependenceReport& report,
                      const std::vector<int>& deltas, const std::string& path);

// Hourly wind speed fields on a rectilinear lat/lon grid.
struct WindField {
    std::vector<double> lats;  // strictly decreasing (north to south)
    std::vector<double> lons;  // strictly increasing
    std::map<std::int64_t, std::vector<double>> speed_by_hour;  // row-major

    bool empty() const { return speed_by_hour.empty(); }
};

struct WindRecord;  // from collocate.hpp

WindField build_wind_field(const std::vector<WindRecord>& records);

// Wind speed at the hour nearest t_utc (ties toward the earlier hour),
// bilinearly interpolated to the pixel centres of the scene grid. Throws
// DataError on spatial or temporal coverage gaps.
Grid interpolate_wind(const WindField& field, const Grid& scene,
                      std::int64_t t_utc);

// c * (V / 6)^x_star per pixel. Valid pixels with nonpositive wind are
// invalidated and counted in *nonpositive_wind when given.
Grid adjust_contrast(const Grid& c, const Grid& wind, double x_star,
                     std::size_t* nonpositive_wind = nullptr);

// Series form of the same adjustment.
std::vector<double> adjust_series(const std::vector<double>& c,
                                  const std::vector<double>& u, double x_star);

} // namespace sarfil
