#include "sarfil/gmf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sarfil/csv.hpp"
#include "sarfil/error.hpp"

namespace sarfil {

namespace {

constexpr double kDegToRad = 0.017453292519943295;
constexpr double kMinWind = 0.2;
constexpr double kMaxWind = 50.0;
constexpr double kMinIncidence = 15.0;
constexpr double kMaxIncidence = 60.0;

// CMOD5-family VV backscatter. The 28 coefficients come from the loaded
// spec; c is 1-based to follow the published coefficient numbering.
double cmod5_vv(const std::vector<double>& coeffs, double v, double phi_deg,
                double theta_deg) {
    auto c = [&coeffs](int i) { return coeffs[static_cast<std::size_t>(i - 1)]; };

    constexpr double theta_m = 40.0;
    constexpr double theta_hr = 25.0;
    constexpr double zpow = 1.6;

    const double y0 = c(19);
    const double pn = c(20);
    const double a = y0 - (y0 - 1.0) / pn;
    const double b = 1.0 / (pn * std::pow(y0 - 1.0, pn - 1.0));

    const double cos_phi = std::cos(phi_deg * kDegToRad);
    const double cos_2phi = 2.0 * cos_phi * cos_phi - 1.0;

    const double x = (theta_deg - theta_m) / theta_hr;
    const double xx = x * x;

    const double a0 = c(1) + c(2) * x + c(3) * xx + c(4) * x * xx;
    const double a1 = c(5) + c(6) * x;
    const double a2 = c(7) + c(8) * x;
    const double gam = c(9) + c(10) * x + c(11) * xx;
    const double s0 = c(12) + c(13) * x;
    const double s = a2 * v;

    double a3;
    if (s < s0) {
        const double g_s0 = 1.0 / (1.0 + std::exp(-s0));
        a3 = g_s0 * std::pow(s / s0, s0 * (1.0 - g_s0));
    } else {
        a3 = 1.0 / (1.0 + std::exp(-s));
    }
    const double b0 = std::pow(a3, gam) * std::pow(10.0, a0 + a1 * v);

    double b1 = c(15) * v * (0.5 + x - std::tanh(4.0 * (x + c(16) + c(17) * v)));
    b1 = (c(14) * (1.0 + x) - b1) / (std::exp(0.34 * (v - c(18))) + 1.0);

    const double v0 = c(21) + c(22) * x + c(23) * xx;
    const double d1 = c(24) + c(25) * x + c(26) * xx;
    const double d2 = c(27) + c(28) * x;
    double v2 = v / v0 + 1.0;
    if (v2 < y0) v2 = a + b * std::pow(v2 - 1.0, pn);
    const double b2 = (-d1 + d2 * v2) * std::exp(-v2);

    const double bracket = 1.0 + b1 * cos_phi + b2 * cos_2phi;
    return b0 * std::pow(std::max(bracket, 0.0), zpow);
}

} // namespace

Polarization parse_polarization(const std::string& s) {
    if (s == "VV" || s == "vv") return Polarization::VV;
    if (s == "HH" || s == "hh") return Polarization::HH;
    throw DataError("unknown polarization: '" + s + "'");
}

std::string polarization_name(Polarization p) {
    return p == Polarization::VV ? "VV" : "HH";
}

double PolRatioTable::at(double inc_deg) const {
    if (incidence_deg.empty())
        throw ConfigError("polarization ratio table is empty");
    if (inc_deg <= incidence_deg.front()) return ratio.front();
    if (inc_deg >= incidence_deg.back()) return ratio.back();
    auto it = std::upper_bound(incidence_deg.begin(), incidence_deg.end(), inc_deg);
    const std::size_t hi = static_cast<std::size_t>(it - incidence_deg.begin());
    const std::size_t lo = hi - 1;
    const double t = (inc_deg - incidence_deg[lo]) /
                     (incidence_deg[hi] - incidence_deg[lo]);
    return ratio[lo] + t * (ratio[hi] - ratio[lo]);
}

GmfSpec load_gmf(const std::string& coeff_path, const std::string& pol_ratio_path) {
    GmfSpec gmf;

    std::ifstream in(coeff_path);
    if (!in) throw ConfigError("cannot open GMF coefficient file: " + coeff_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (gmf.name.empty()) {
            gmf.name = t;
            continue;
        }
        try {
            gmf.coeffs.push_back(parse_double(t, "coefficient"));
        } catch (const DataError& e) {
            throw ConfigError(coeff_path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (gmf.name.empty())
        throw ConfigError("GMF coefficient file has no model name header: " + coeff_path);
    const bool cmod_family = gmf.name.rfind("CMOD5", 0) == 0;
    if (!cmod_family)
        throw ConfigError("unsupported GMF model '" + gmf.name + "' in " + coeff_path);
    if (gmf.coeffs.size() != 28)
        throw ConfigError(gmf.name + " expects 28 coefficients, got " +
                          std::to_string(gmf.coeffs.size()) + " in " + coeff_path);

    std::ifstream pin(pol_ratio_path);
    if (!pin) throw ConfigError("cannot open polarization ratio table: " + pol_ratio_path);
    line_no = 0;
    while (std::getline(pin, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = split_csv(t);
        if (fields.size() != 2)
            throw ConfigError(pol_ratio_path + ":" + std::to_string(line_no) +
                              ": expected incidence_deg,ratio");
        if (fields[0] == "incidence_deg") continue;
        double inc, r;
        try {
            inc = parse_double(fields[0], "incidence_deg");
            r = parse_double(fields[1], "ratio");
        } catch (const DataError& e) {
            throw ConfigError(pol_ratio_path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (!gmf.pol_ratio.incidence_deg.empty() &&
            inc <= gmf.pol_ratio.incidence_deg.back())
            throw ConfigError(pol_ratio_path + ":" + std::to_string(line_no) +
                              ": incidence must be strictly increasing");
        if (r <= 0.0)
            throw ConfigError(pol_ratio_path + ":" + std::to_string(line_no) +
                              ": ratio must be > 0");
        gmf.pol_ratio.incidence_deg.push_back(inc);
        gmf.pol_ratio.ratio.push_back(r);
    }
    if (gmf.pol_ratio.empty())
        throw ConfigError("polarization ratio table is empty: " + pol_ratio_path);
    return gmf;
}

double gmf_sigma0(const GmfSpec& gmf, double wind_speed, double rel_azimuth_deg,
                  double incidence_deg, Polarization pol, std::size_t* clamped) {
    if (gmf.coeffs.size() != 28) throw ConfigError("GMF coefficients not loaded");
    double v = wind_speed;
    double theta = incidence_deg;
    bool was_clamped = false;
    if (v < kMinWind) { v = kMinWind; was_clamped = true; }
    if (v > kMaxWind) { v = kMaxWind; was_clamped = true; }
    if (theta < kMinIncidence) { theta = kMinIncidence; was_clamped = true; }
    if (theta > kMaxIncidence) { theta = kMaxIncidence; was_clamped = true; }
    if (was_clamped && clamped) ++*clamped;

    const double vv = cmod5_vv(gmf.coeffs, v, rel_azimuth_deg, theta);
    if (pol == Polarization::VV) return vv;
    return vv / gmf.pol_ratio.at(theta);
}

void validate_geometry(const SceneGeometry& geom) {
    if (geom.incidence.empty()) throw DataError("scene geometry has no incidence grid");
    for (std::size_t k = 0; k < geom.incidence.size(); ++k) {
        if (!geom.incidence.valid[k]) continue;
        const double inc = geom.incidence.values[k];
        if (inc < kMinIncidence || inc > kMaxIncidence)
            throw DataError("incidence angle out of range: " + fmt_double(inc));
    }
    if (geom.track_heading_deg < 0.0 || geom.track_heading_deg >= 360.0)
        throw DataError("track heading out of [0, 360): " +
                        fmt_double(geom.track_heading_deg));
    if (geom.look_direction_deg < 0.0 || geom.look_direction_deg >= 360.0)
        throw DataError("look direction out of [0, 360): " +
                        fmt_double(geom.look_direction_deg));
}

MaskBounds mask_bounds(const GmfSpec& gmf, const SceneGeometry& geom,
                       Polarization pol, double lo_wind, double hi_wind) {
    validate_geometry(geom);
    const Grid& inc = geom.incidence;
    MaskBounds b{Grid(inc.nrows, inc.ncols, inc.pixel_size_m, inc.origin_lat,
                      inc.origin_lon, 0.0, false),
                 Grid(inc.nrows, inc.ncols, inc.pixel_size_m, inc.origin_lat,
                      inc.origin_lon, 0.0, false)};
    for (int i = 0; i < inc.nrows; ++i) {
        for (int j = 0; j < inc.ncols; ++j) {
            if (!inc.is_valid(i, j)) {
                b.lo.set_invalid(i, j);
                b.hi.set_invalid(i, j);
                continue;
            }
            const double theta = inc.at(i, j);
            // Track-parallel wind is crosswind to the (track-perpendicular)
            // look direction; wind toward the satellite is upwind.
            b.lo.set(i, j, gmf_sigma0(gmf, lo_wind, 90.0, theta, pol));
            b.hi.set(i, j, gmf_sigma0(gmf, hi_wind, 0.0, theta, pol));
        }
    }
    return b;
}

Grid apply_mask(const Grid& sigma0, const Grid& lo, const Grid& hi) {
    if (!sigma0.same_shape(lo) || !sigma0.same_shape(hi) ||
        std::abs(sigma0.pixel_size_m - lo.pixel_size_m) > 1e-9 * sigma0.pixel_size_m)
        throw DataError("apply_mask: bounds are not co-registered with sigma0");
    Grid out = sigma0;
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (!out.valid[k]) continue;
        if (!lo.valid[k] || !hi.valid[k]) {
            out.values[k] = 0.0;
            out.valid[k] = 0;
            continue;
        }
        const double v = out.values[k];
        if (v < lo.values[k] || v > hi.values[k]) {
            out.values[k] = 0.0;
            out.valid[k] = 0;
        }
    }
    return out;
}

} // namespace sarfil
