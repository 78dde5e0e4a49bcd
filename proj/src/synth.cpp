#include "sarfil/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "sarfil/csv.hpp"
#include "sarfil/error.hpp"
#include "sarfil/rng.hpp"

namespace sarfil {

namespace {

constexpr double kDegToRad = 0.017453292519943295;

void validate_genspec(const GenSpec& g) {
    if (g.n < 1) throw ConfigError("genspec: n must be >= 1");
    if (g.sigma_t2 < 0.0 || g.sigma_eps2 < 0.0 || g.sigma_c2 < 0.0 ||
        g.sigma_u2 < 0.0)
        throw ConfigError("genspec: variances must be >= 0");
    if (g.sigma_t2 == 0.0 && g.b != 0.0)
        throw ConfigError("genspec: b requires sigma_t2 > 0");
    if (g.scene_nrows < 1 || g.scene_ncols < 1)
        throw ConfigError("genspec: scene dimensions must be >= 1");
    if (g.base_pixel_m <= 0.0) throw ConfigError("genspec: base_pixel_m must be > 0");
    if (g.scene_wind <= 0.0) throw ConfigError("genspec: scene_wind must be > 0");
    if (g.filament_count < 0) throw ConfigError("genspec: filament_count must be >= 0");
    if (g.filament_width_m <= 0.0 || g.filament_length_m <= 0.0)
        throw ConfigError("genspec: filament geometry must be positive");
    if (g.speckle_sigma < 0.0) throw ConfigError("genspec: speckle_sigma must be >= 0");
}

PairedSeries gen_series_offsets(const GenSpec& g, const std::vector<int>& deltas) {
    validate_genspec(g);
    std::set<std::int64_t> offset_set{0};
    for (int d : deltas) {
        if (d <= 0) throw ConfigError("genspec: sampling interval must be positive");
        offset_set.insert(-2LL * d);
        offset_set.insert(-1LL * d);
        offset_set.insert(1LL * d);
        offset_set.insert(2LL * d);
    }
    const std::vector<std::int64_t> offsets(offset_set.begin(), offset_set.end());

    const double sigma_t = std::sqrt(g.sigma_t2);
    const double sigma_eps = std::sqrt(g.sigma_eps2);
    const double sigma_c = std::sqrt(g.sigma_c2);
    const double sigma_u = std::sqrt(g.sigma_u2);
    const double beta = g.sigma_t2 > 0.0 ? g.b / g.sigma_t2 : 0.0;

    PairedSeries series;
    series.c.reserve(g.n);
    series.u0.reserve(g.n);
    for (int d : deltas) series.lags[d];

    const SplitMix64 base(g.seed);
    for (std::size_t i = 0; i < g.n; ++i) {
        SplitMix64 rng = base.fork(i);
        const double a = sigma_t * rng.next_normal();
        const double b = sigma_t * rng.next_normal();
        const double eps_c = sigma_c * rng.next_normal();
        std::map<std::int64_t, double> u_at;
        double t0 = 0.0, eps0 = 0.0;
        for (std::int64_t tau : offsets) {
            const double t = a * std::cos(g.omega * tau) + b * std::sin(g.omega * tau);
            const double eps = sigma_eps * rng.next_normal();
            const double eps_u = sigma_u * rng.next_normal();
            u_at[tau] = g.alpha_u + beta * t + eps + eps_u;
            if (tau == 0) {
                t0 = t;
                eps0 = eps;
            }
        }
        series.c.push_back(t0 + eps0 + eps_c);
        series.u0.push_back(u_at[0]);
        series.t_hour.push_back(static_cast<std::int64_t>(i) * 24);
        for (int d : deltas) {
            series.lags[d].m2.push_back(u_at[-2LL * d]);
            series.lags[d].m1.push_back(u_at[-1LL * d]);
            series.lags[d].p1.push_back(u_at[1LL * d]);
            series.lags[d].p2.push_back(u_at[2LL * d]);
        }
    }
    return series;
}

} // namespace

GenSpec load_genspec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open genspec file: " + path);
    GenSpec g;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        try {
            if (key == "seed")
                g.seed = static_cast<std::uint64_t>(parse_int(value, key));
            else if (key == "n")
                g.n = static_cast<std::size_t>(parse_int(value, key));
            else if (key == "b") g.b = parse_double(value, key);
            else if (key == "sigma_t2") g.sigma_t2 = parse_double(value, key);
            else if (key == "sigma_eps2") g.sigma_eps2 = parse_double(value, key);
            else if (key == "sigma_c2") g.sigma_c2 = parse_double(value, key);
            else if (key == "sigma_u2") g.sigma_u2 = parse_double(value, key);
            else if (key == "alpha_u") g.alpha_u = parse_double(value, key);
            else if (key == "omega") g.omega = parse_double(value, key);
            else if (key == "scene_nrows")
                g.scene_nrows = static_cast<int>(parse_int(value, key));
            else if (key == "scene_ncols")
                g.scene_ncols = static_cast<int>(parse_int(value, key));
            else if (key == "base_pixel_m") g.base_pixel_m = parse_double(value, key);
            else if (key == "origin_lat") g.origin_lat = parse_double(value, key);
            else if (key == "origin_lon") g.origin_lon = parse_double(value, key);
            else if (key == "filament_count")
                g.filament_count = static_cast<int>(parse_int(value, key));
            else if (key == "filament_width_m")
                g.filament_width_m = parse_double(value, key);
            else if (key == "filament_length_m")
                g.filament_length_m = parse_double(value, key);
            else if (key == "filament_orientation_deg")
                g.filament_orientation_deg = parse_double(value, key);
            else if (key == "filament_curvature")
                g.filament_curvature = parse_double(value, key);
            else if (key == "filament_contrast")
                g.filament_contrast = parse_double(value, key);
            else if (key == "scene_wind") g.scene_wind = parse_double(value, key);
            else if (key == "scene_incidence_deg")
                g.scene_incidence_deg = parse_double(value, key);
            else if (key == "scene_rel_azimuth_deg")
                g.scene_rel_azimuth_deg = parse_double(value, key);
            else if (key == "speckle_sigma") g.speckle_sigma = parse_double(value, key);
            else if (key == "gmf_coeffs") g.gmf_coeff_path = value;
            else if (key == "pol_ratio") g.pol_ratio_path = value;
            else
                throw ConfigError("unknown genspec key '" + key + "'");
        } catch (const DataError& e) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    validate_genspec(g);
    return g;
}

PairedSeries gen_model_series(const GenSpec& g, int delta_h) {
    return gen_series_offsets(g, {delta_h});
}

PairedSeries gen_model_series(const GenSpec& g, const std::vector<int>& deltas) {
    return gen_series_offsets(g, deltas);
}

double population_pearson(const GenSpec& g) {
    const double beta = g.sigma_t2 > 0.0 ? g.b / g.sigma_t2 : 0.0;
    const double var_c = g.sigma_t2 + g.sigma_eps2 + g.sigma_c2;
    const double var_u = beta * beta * g.sigma_t2 + g.sigma_eps2 + g.sigma_u2;
    if (var_c <= 0.0 || var_u <= 0.0) return 0.0;
    return (g.b + g.sigma_eps2) / std::sqrt(var_c * var_u);
}

SceneTruth gen_scene(const GenSpec& g, const GmfSpec& gmf) {
    validate_genspec(g);

    const double background = gmf_sigma0(gmf, g.scene_wind, g.scene_rel_azimuth_deg,
                                         g.scene_incidence_deg, Polarization::VV);
    Grid sigma0(g.scene_nrows, g.scene_ncols, g.base_pixel_m, g.origin_lat,
                g.origin_lon, background);

    const SplitMix64 base(g.seed);
    if (g.speckle_sigma > 0.0) {
        SplitMix64 rng = base.fork(0);
        const double s = g.speckle_sigma;
        for (std::size_t k = 0; k < sigma0.size(); ++k)
            sigma0.values[k] *= std::exp(s * rng.next_normal() - 0.5 * s * s);
    }

    // Strip injection at the base resolution, in local scene meters
    // (x east along columns, y south along rows).
    const double c_eff =
        g.filament_contrast * std::pow(g.scene_wind / 6.0, -0.8);
    std::vector<std::uint8_t> strip(sigma0.size(), 0);
    const double width_half = g.filament_width_m / 2.0;
    const double step = std::min(g.base_pixel_m, g.filament_width_m) / 4.0;
    for (int f = 0; f < g.filament_count; ++f) {
        double cx = g.scene_ncols * g.base_pixel_m / 2.0;
        double cy = g.scene_nrows * g.base_pixel_m / 2.0;
        double phi = g.filament_orientation_deg * kDegToRad;
        if (g.filament_count > 1) {
            SplitMix64 rng = base.fork(1000 + static_cast<std::uint64_t>(f));
            cx = rng.next_uniform(0.25, 0.75) * g.scene_ncols * g.base_pixel_m;
            cy = rng.next_uniform(0.25, 0.75) * g.scene_nrows * g.base_pixel_m;
            phi = rng.next_uniform(0.0, 3.141592653589793);
        }
        double x = cx - 0.5 * g.filament_length_m * std::cos(phi);
        double y = cy - 0.5 * g.filament_length_m * std::sin(phi);
        const int r_px = static_cast<int>(std::ceil(width_half / g.base_pixel_m)) + 1;
        for (double s = 0.0; s <= g.filament_length_m; s += step) {
            const double heading = phi + g.filament_curvature * s;
            if (s > 0.0) {
                x += step * std::cos(heading);
                y += step * std::sin(heading);
            }
            const int pc = static_cast<int>(std::floor(x / g.base_pixel_m));
            const int pr = static_cast<int>(std::floor(y / g.base_pixel_m));
            for (int i = pr - r_px; i <= pr + r_px; ++i) {
                if (i < 0 || i >= g.scene_nrows) continue;
                const double py = (i + 0.5) * g.base_pixel_m;
                for (int j = pc - r_px; j <= pc + r_px; ++j) {
                    if (j < 0 || j >= g.scene_ncols) continue;
                    const double px = (j + 0.5) * g.base_pixel_m;
                    const double d2 = (px - x) * (px - x) + (py - y) * (py - y);
                    if (d2 <= width_half * width_half)
                        strip[sigma0.idx(i, j)] = 1;
                }
            }
        }
    }
    for (std::size_t k = 0; k < sigma0.size(); ++k)
        if (strip[k]) sigma0.values[k] *= 1.0 + c_eff;

    // Truth lives at the 800-m level; replicate the pyramid's origin
    // arithmetic so the truth grid co-registers with derived levels.
    double ratio = 800.0 / g.base_pixel_m;
    const int halvings = static_cast<int>(std::lround(std::log2(ratio)));
    if (halvings < 0 || std::abs(ratio - std::exp2(halvings)) > 1e-9 * ratio)
        throw ConfigError("genspec: base_pixel_m must reach 800 m by halving");
    double lat = g.origin_lat, lon = g.origin_lon, ps = g.base_pixel_m;
    int rows = g.scene_nrows, cols = g.scene_ncols;
    for (int k = 0; k < halvings; ++k) {
        const double half = ps / 2.0;
        lon += half / (kMetersPerDegree * std::cos(lat * kDegToRad));
        lat -= half / kMetersPerDegree;
        ps *= 2.0;
        rows = (rows + 1) / 2;
        cols = (cols + 1) / 2;
    }
    const int factor = 1 << halvings;

    Grid truth_mag(rows, cols, ps, lat, lon, 0.0, true);
    for (int bi = 0; bi < rows; ++bi) {
        for (int bj = 0; bj < cols; ++bj) {
            bool full = true;
            for (int di = 0; di < factor && full; ++di) {
                for (int dj = 0; dj < factor; ++dj) {
                    const int i = bi * factor + di, j = bj * factor + dj;
                    if (i >= g.scene_nrows || j >= g.scene_ncols ||
                        !strip[sigma0.idx(i, j)]) {
                        full = false;
                        break;
                    }
                }
            }
            if (full) truth_mag.at(bi, bj) = c_eff;
        }
    }

    SceneTruth out;
    out.sigma0 = std::move(sigma0);
    const Labeling labeling = label_components(truth_mag, 8);
    out.truth = filter_span(truth_mag, labeling, 0.0);
    out.wind = Grid(rows, cols, ps, lat, lon, g.scene_wind);
    return out;
}

} // namespace sarfil
