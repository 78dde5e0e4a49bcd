#include "sarfil/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "sarfil/collocate.hpp"
#include "sarfil/csv.hpp"
#include "sarfil/error.hpp"

namespace sarfil {

std::vector<double> default_x_grid() {
    std::vector<double> grid;
    grid.reserve(100);
    for (int i = -50; i <= 50; ++i) {
        if (i == 0) continue;
        grid.push_back(i * 0.1);
    }
    return grid;
}

void validate_sweep_config(const SweepConfig& cfg) {
    if (cfg.x_grid.empty()) throw ConfigError("sweep: empty exponent grid");
    for (std::size_t i = 0; i < cfg.x_grid.size(); ++i) {
        if (cfg.x_grid[i] == 0.0)
            throw ConfigError("sweep: zero exponent is excluded from the grid");
        if (i > 0 && cfg.x_grid[i] <= cfg.x_grid[i - 1])
            throw ConfigError("sweep: exponent grid must be strictly increasing");
    }
    for (int d : cfg.deltas)
        if (d <= 0) throw ConfigError("sweep: sampling intervals must be positive");
}

namespace {

std::vector<double> powered(const std::vector<double>& u, double x) {
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::pow(u[i], x);
    return out;
}

void track_max(std::optional<ArgmaxRecord>& rec, double x, double value) {
    if (!rec || value > rec->value) rec = ArgmaxRecord{x, value};
}

} // namespace

DependenceReport sweep_exponent(const PairedSeries& s, const SweepConfig& cfg) {
    validate_sweep_config(cfg);
    if (s.size() < 8) throw DataError("sweep_exponent: need at least 8 samples");

    DependenceReport report;
    report.x_star = cfg.x_star;
    report.points.reserve(cfg.x_grid.size());

    std::optional<ArgmaxRecord> best_p, best_d;
    std::map<int, std::optional<ArgmaxRecord>> best_lin, best_nonlin;
    for (int d : cfg.deltas) {
        best_lin[d] = std::nullopt;
        best_nonlin[d] = std::nullopt;
    }

    for (double x : cfg.x_grid) {
        SweepPoint pt;
        pt.x = x;

        PairedSeries px;
        px.c = s.c;
        px.u0 = powered(s.u0, x);
        px.t_hour = s.t_hour;
        pt.abs_pearson = std::abs(pearson(s.c, px.u0));
        pt.dcor = dcor(s.c, px.u0);
        track_max(best_p, x, pt.abs_pearson);
        track_max(best_d, x, pt.dcor);

        for (int d : cfg.deltas) {
            auto it = s.lags.find(d);
            if (it == s.lags.end())
                throw DataError("sweep_exponent: series lacks lag set for delta " +
                                std::to_string(d) + " h");
            LagSet lag;
            lag.m2 = powered(it->second.m2, x);
            lag.m1 = powered(it->second.m1, x);
            lag.p1 = powered(it->second.p1, x);
            lag.p2 = powered(it->second.p2, x);
            px.lags[d] = std::move(lag);

            const ModelSolution sol = solve_measurement_model(px, d);
            auto parts = decompose_pearson(sol, variance(px.c), variance(px.u0));
            if (!parts) {
                pt.components[d] = std::nullopt;
                continue;
            }
            SweepPoint::Component comp{std::abs(parts->first), parts->second};
            pt.components[d] = comp;
            track_max(best_lin[d], x, comp.lin);
            track_max(best_nonlin[d], x, comp.nonlin);
        }
        report.points.push_back(std::move(pt));
    }

    report.max_abs_pearson = *best_p;
    report.max_dcor = *best_d;
    report.max_lin = std::move(best_lin);
    report.max_nonlin = std::move(best_nonlin);
    report.low_confidence = report.max_abs_pearson.value < cfg.low_confidence_threshold;
    return report;
}

void write_report_csv(const DependenceReport& report,
                      const std::vector<int>& deltas, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "x,abs_pearson,dcor";
    for (int d : deltas) out << ",lin_d" << d << ",nonlin_d" << d;
    out << "\n";
    for (const auto& pt : report.points) {
        out << fmt_double(pt.x) << "," << fmt_double(pt.abs_pearson) << ","
            << fmt_double(pt.dcor);
        for (int d : deltas) {
            auto it = pt.components.find(d);
            if (it != pt.components.end() && it->second)
                out << "," << fmt_double(it->second->lin) << ","
                    << fmt_double(it->second->nonlin);
            else
                out << ",,";
        }
        out << "\n";
    }
    if (!out) throw DataError("short write: " + path);
}

WindField build_wind_field(const std::vector<WindRecord>& records) {
    WindField field;
    std::vector<double> lats, lons;
    for (const auto& r : records) {
        lats.push_back(r.lat);
        lons.push_back(r.lon);
    }
    std::sort(lats.begin(), lats.end(), std::greater<>());
    lats.erase(std::unique(lats.begin(), lats.end()), lats.end());
    std::sort(lons.begin(), lons.end());
    lons.erase(std::unique(lons.begin(), lons.end()), lons.end());
    if (lats.empty() || lons.empty()) return field;
    field.lats = lats;
    field.lons = lons;

    auto lat_index = [&](double lat) {
        for (std::size_t i = 0; i < lats.size(); ++i)
            if (lats[i] == lat) return i;
        return lats.size();
    };
    auto lon_index = [&](double lon) {
        for (std::size_t i = 0; i < lons.size(); ++i)
            if (lons[i] == lon) return i;
        return lons.size();
    };

    const double nan = std::nan("");
    for (const auto& r : records) {
        auto& cells = field.speed_by_hour[hour_of(r.t_utc)];
        if (cells.empty()) cells.assign(lats.size() * lons.size(), nan);
        cells[lat_index(r.lat) * lons.size() + lon_index(r.lon)] = r.speed();
    }
    for (const auto& [hour, cells] : field.speed_by_hour) {
        for (double v : cells)
            if (std::isnan(v))
                throw DataError("wind field at " + format_iso_hour(hour) +
                                " does not cover the full lat/lon grid");
    }
    return field;
}

Grid interpolate_wind(const WindField& field, const Grid& scene,
                      std::int64_t t_utc) {
    if (field.empty()) throw DataError("interpolate_wind: empty wind field");

    // Nearest hourly sample; ties go to the earlier hour.
    std::int64_t best_hour = 0;
    std::int64_t best_abs = -1;
    for (const auto& [hour, cells] : field.speed_by_hour) {
        (void)cells;
        const std::int64_t diff = std::llabs(hour_to_utc(hour) - t_utc);
        if (best_abs < 0 || diff < best_abs) {
            best_abs = diff;
            best_hour = hour;
        }
    }
    if (best_abs > 1800)
        throw DataError("interpolate_wind: no wind sample within 30 min of " +
                        format_iso_utc(t_utc));
    const std::vector<double>& cells = field.speed_by_hour.at(best_hour);

    const auto& lats = field.lats;
    const auto& lons = field.lons;
    Grid out(scene.nrows, scene.ncols, scene.pixel_size_m, scene.origin_lat,
             scene.origin_lon);
    for (int i = 0; i < scene.nrows; ++i) {
        const double lat = scene.lat_of_row(i);
        if (lat > lats.front() || lat < lats.back())
            throw DataError("interpolate_wind: scene latitude " + fmt_double(lat) +
                            " outside the wind field");
        std::size_t i1 = 1;
        while (i1 + 1 < lats.size() && lats[i1] > lat) ++i1;
        const std::size_t i0 = i1 - 1;
        const double tlat = lats[i0] == lats[i1]
                                ? 0.0
                                : (lats[i0] - lat) / (lats[i0] - lats[i1]);
        for (int j = 0; j < scene.ncols; ++j) {
            const double lon = scene.lon_of_col(j);
            if (lon < lons.front() || lon > lons.back())
                throw DataError("interpolate_wind: scene longitude " +
                                fmt_double(lon) + " outside the wind field");
            std::size_t j1 = 1;
            while (j1 + 1 < lons.size() && lons[j1] < lon) ++j1;
            const std::size_t j0 = j1 - 1;
            const double tlon = lons[j0] == lons[j1]
                                    ? 0.0
                                    : (lon - lons[j0]) / (lons[j1] - lons[j0]);
            const double v00 = cells[i0 * lons.size() + j0];
            const double v01 = cells[i0 * lons.size() + j1];
            const double v10 = cells[i1 * lons.size() + j0];
            const double v11 = cells[i1 * lons.size() + j1];
            const double top = v00 + tlon * (v01 - v00);
            const double bot = v10 + tlon * (v11 - v10);
            out.set(i, j, top + tlat * (bot - top));
        }
    }
    return out;
}

Grid adjust_contrast(const Grid& c, const Grid& wind, double x_star,
                     std::size_t* nonpositive_wind) {
    if (!c.same_shape(wind) ||
        std::abs(c.pixel_size_m - wind.pixel_size_m) > 1e-9 * c.pixel_size_m)
        throw DataError("adjust_contrast: wind grid is not co-registered");
    Grid out = c;
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (!out.valid[k]) continue;
        if (!wind.valid[k] || wind.values[k] <= 0.0) {
            out.values[k] = 0.0;
            out.valid[k] = 0;
            if (nonpositive_wind) ++*nonpositive_wind;
            continue;
        }
        out.values[k] *= std::pow(wind.values[k] / kAdjustRefSpeed, x_star);
    }
    return out;
}

std::vector<double> adjust_series(const std::vector<double>& c,
                                  const std::vector<double>& u, double x_star) {
    if (c.size() != u.size()) throw DataError("adjust_series: length mismatch");
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        out[i] = c[i] * std::pow(u[i] / kAdjustRefSpeed, x_star);
    return out;
}

} // namespace sarfil
