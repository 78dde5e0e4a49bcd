#include "sarfil/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "sarfil/csv.hpp"
#include "sarfil/error.hpp"

namespace sarfil {

namespace {

constexpr double kDegToRad = 0.017453292519943295;

double cos_origin(double origin_lat) {
    return std::cos(origin_lat * kDegToRad);
}

// Coarse/fine pixel-size ratio when it is an exact power of two, else -1.
int pow2_ratio(double fine_px, double coarse_px) {
    if (fine_px <= 0.0 || coarse_px < fine_px) return -1;
    double r = coarse_px / fine_px;
    int k = static_cast<int>(std::lround(std::log2(r)));
    if (k < 0 || k > 30) return -1;
    double exact = static_cast<double>(1 << k);
    if (std::abs(r - exact) > 1e-9 * exact) return -1;
    return 1 << k;
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
           (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

} // namespace

Grid::Grid(int nrows_, int ncols_, double pixel_size_m_, double origin_lat_,
           double origin_lon_, double fill, bool fill_valid)
    : ncols(ncols_),
      nrows(nrows_),
      pixel_size_m(pixel_size_m_),
      origin_lat(origin_lat_),
      origin_lon(origin_lon_),
      values(static_cast<std::size_t>(nrows_) * ncols_, fill),
      valid(static_cast<std::size_t>(nrows_) * ncols_, fill_valid ? 1 : 0) {}

double Grid::lat_of_row(int row) const {
    return origin_lat - row * pixel_size_m / kMetersPerDegree;
}

double Grid::lon_of_col(int col) const {
    return origin_lon + col * pixel_size_m / (kMetersPerDegree * cos_origin(origin_lat));
}

int Pyramid::level_at(double pixel_size_m) const {
    for (std::size_t k = 0; k < levels.size(); ++k) {
        double ps = levels[k].pixel_size_m;
        if (std::abs(ps - pixel_size_m) <= 1e-9 * pixel_size_m) return static_cast<int>(k);
    }
    return -1;
}

Grid downsample_halve(const Grid& g) {
    if (g.empty()) throw DataError("downsample_halve: empty grid");
    const int out_rows = (g.nrows + 1) / 2;
    const int out_cols = (g.ncols + 1) / 2;
    const double half = g.pixel_size_m / 2.0;
    Grid out(out_rows, out_cols, g.pixel_size_m * 2.0,
             g.origin_lat - half / kMetersPerDegree,
             g.origin_lon + half / (kMetersPerDegree * cos_origin(g.origin_lat)),
             0.0, false);
    for (int i = 0; i < out_rows; ++i) {
        for (int j = 0; j < out_cols; ++j) {
            const int r0 = 2 * i, c0 = 2 * j;
            const bool have_r1 = r0 + 1 < g.nrows;
            const bool have_c1 = c0 + 1 < g.ncols;
            if (have_r1 && have_c1 && g.is_valid(r0, c0) && g.is_valid(r0, c0 + 1) &&
                g.is_valid(r0 + 1, c0) && g.is_valid(r0 + 1, c0 + 1)) {
                // Pairwise sum keeps full 2x2 blocks of equal values exact.
                double s = (g.at(r0, c0) + g.at(r0, c0 + 1)) +
                           (g.at(r0 + 1, c0) + g.at(r0 + 1, c0 + 1));
                out.set(i, j, s / 4.0);
                continue;
            }
            double sum = 0.0;
            int count = 0;
            for (int di = 0; di < 2; ++di) {
                for (int dj = 0; dj < 2; ++dj) {
                    const int r = r0 + di, c = c0 + dj;
                    if (r >= g.nrows || c >= g.ncols) continue;
                    if (!g.is_valid(r, c)) continue;
                    sum += g.at(r, c);
                    ++count;
                }
            }
            if (count > 0)
                out.set(i, j, sum / count);
            else
                out.set_invalid(i, j);
        }
    }
    return out;
}

Pyramid build_pyramid(const Grid& g, int n_levels) {
    if (n_levels < 1) throw ConfigError("build_pyramid: n_levels must be >= 1");
    if (g.empty()) throw DataError("build_pyramid: empty grid");
    Pyramid p;
    p.levels.reserve(static_cast<std::size_t>(n_levels));
    p.levels.push_back(g);
    for (int k = 1; k < n_levels; ++k) {
        const Grid& prev = p.levels.back();
        if (prev.nrows <= 1 && prev.ncols <= 1)
            throw DataError("build_pyramid: level exhaustion at level " +
                            std::to_string(k) + " (previous level is 1x1)");
        p.levels.push_back(downsample_halve(prev));
    }
    return p;
}

Grid block_replicate(const Grid& coarse, const Grid& fine) {
    const int ratio = pow2_ratio(fine.pixel_size_m, coarse.pixel_size_m);
    if (ratio < 1)
        throw DataError("block_replicate: pixel sizes not in power-of-two ratio (" +
                        fmt_double(fine.pixel_size_m) + " vs " +
                        fmt_double(coarse.pixel_size_m) + ")");
    if ((fine.nrows + ratio - 1) / ratio != coarse.nrows ||
        (fine.ncols + ratio - 1) / ratio != coarse.ncols)
        throw DataError("block_replicate: grids are not pyramid-registered");
    Grid out(fine.nrows, fine.ncols, fine.pixel_size_m, fine.origin_lat,
             fine.origin_lon, 0.0, false);
    for (int i = 0; i < fine.nrows; ++i) {
        const int ci = i / ratio;
        for (int j = 0; j < fine.ncols; ++j) {
            const int cj = j / ratio;
            if (coarse.is_valid(ci, cj))
                out.set(i, j, coarse.at(ci, cj));
            else
                out.set_invalid(i, j);
        }
    }
    return out;
}

Grid contrast(const Grid& fine, const Grid& coarse) {
    Grid smoothed = block_replicate(coarse, fine);
    Grid out(fine.nrows, fine.ncols, fine.pixel_size_m, fine.origin_lat,
             fine.origin_lon, 0.0, false);
    for (int i = 0; i < fine.nrows; ++i) {
        for (int j = 0; j < fine.ncols; ++j) {
            if (!fine.is_valid(i, j) || !smoothed.is_valid(i, j)) {
                out.set_invalid(i, j);
                continue;
            }
            const double bg = smoothed.at(i, j);
            if (bg <= 0.0) {
                out.set_invalid(i, j);
                continue;
            }
            out.set(i, j, (fine.at(i, j) - bg) / bg);
        }
    }
    return out;
}

void write_sgrd(const Grid& g, const std::string& path) {
    std::string buf;
    buf.reserve(37 + g.size() * 4);
    buf += "SGRD";
    buf.push_back(0x01);
    put_u32(buf, static_cast<std::uint32_t>(g.ncols));
    put_u32(buf, static_cast<std::uint32_t>(g.nrows));
    put_u64(buf, std::bit_cast<std::uint64_t>(g.pixel_size_m));
    put_u64(buf, std::bit_cast<std::uint64_t>(g.origin_lat));
    put_u64(buf, std::bit_cast<std::uint64_t>(g.origin_lon));
    for (std::size_t k = 0; k < g.size(); ++k) {
        const float f = g.valid[k] ? static_cast<float>(g.values[k])
                                   : std::numeric_limits<float>::quiet_NaN();
        put_u32(buf, std::bit_cast<std::uint32_t>(f));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw DataError("short write: " + path);
}

Grid read_sgrd(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open grid file: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    if (buf.size() < 37 || buf.compare(0, 4, "SGRD") != 0)
        throw DataError("not an SGRD file: " + path);
    if (static_cast<unsigned char>(buf[4]) != 0x01)
        throw DataError("unsupported SGRD version in " + path);
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data()) + 5;
    const std::uint32_t ncols = get_u32(p);
    const std::uint32_t nrows = get_u32(p + 4);
    const double pixel = std::bit_cast<double>(get_u64(p + 8));
    const double lat = std::bit_cast<double>(get_u64(p + 16));
    const double lon = std::bit_cast<double>(get_u64(p + 24));
    const std::size_t n = std::size_t(ncols) * nrows;
    if (ncols == 0 || nrows == 0 || pixel <= 0.0)
        throw DataError("bad SGRD header in " + path);
    if (buf.size() != 37 + n * 4)
        throw DataError("SGRD size mismatch in " + path);
    Grid g(static_cast<int>(nrows), static_cast<int>(ncols), pixel, lat, lon);
    const unsigned char* v = p + 32;
    for (std::size_t k = 0; k < n; ++k) {
        const float f = std::bit_cast<float>(get_u32(v + 4 * k));
        if (std::isnan(f)) {
            g.values[k] = 0.0;
            g.valid[k] = 0;
        } else {
            g.values[k] = static_cast<double>(f);
            g.valid[k] = 1;
        }
    }
    return g;
}

void write_pgm(const Grid& g, const std::string& path) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.valid[k]) continue;
        lo = std::min(lo, g.values[k]);
        hi = std::max(hi, g.values[k]);
    }
    const bool flat = !(hi > lo);
    if (!std::isfinite(lo)) { lo = 0.0; hi = 0.0; }

    std::string header = "P5\n" + std::to_string(g.ncols) + " " +
                         std::to_string(g.nrows) + "\n255\n";
    std::string body;
    body.reserve(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        int gray = 0;
        if (g.valid[k] && !flat) {
            double t = (g.values[k] - lo) / (hi - lo);
            gray = static_cast<int>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)));
        }
        body.push_back(static_cast<char>(gray));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << header;
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw DataError("short write: " + path);

    std::ofstream side(path + ".txt", std::ios::trunc);
    if (!side) throw DataError("cannot open for writing: " + path + ".txt");
    side << "format P5, maxval 255\n";
    side << "value_min " << fmt_double(lo) << "\n";
    side << "value_max " << fmt_double(hi) << "\n";
    side << "gray = round(255*(value - value_min)/(value_max - value_min))"
            "; invalid pixels and flat grids are written as gray 0\n";
}

} // namespace sarfil
