#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace sarfil {

inline constexpr double kMetersPerDegree = 111320.0;

// Georeferenced raster. Row-major storage, origin at the upper-left pixel
// centre; rows increase southward, columns eastward. Values are linear
// units (never dB). Pixel geolocation uses a local equirectangular mapping
// anchored at the origin latitude.
struct Grid {
    int ncols = 0;
    int nrows = 0;
    double pixel_size_m = 0.0;
    double origin_lat = 0.0;
    double origin_lon = 0.0;
    std::vector<double> values;        // row-major
    std::vector<std::uint8_t> valid;   // 0 = masked / no data

    Grid() = default;
    Grid(int nrows_, int ncols_, double pixel_size_m_, double origin_lat_,
         double origin_lon_, double fill = 0.0, bool fill_valid = true);

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
    std::size_t idx(int row, int col) const {
        return static_cast<std::size_t>(row) * ncols + col;
    }
    double at(int row, int col) const { return values[idx(row, col)]; }
    double& at(int row, int col) { return values[idx(row, col)]; }
    bool is_valid(int row, int col) const { return valid[idx(row, col)] != 0; }
    void set(int row, int col, double v) {
        values[idx(row, col)] = v;
        valid[idx(row, col)] = 1;
    }
    void set_invalid(int row, int col) {
        values[idx(row, col)] = 0.0;
        valid[idx(row, col)] = 0;
    }

    double lat_of_row(int row) const;
    double lon_of_col(int col) const;

    bool same_shape(const Grid& other) const {
        return ncols == other.ncols && nrows == other.nrows;
    }
};

// Resolution-halving stack; levels[0] is the base, each level doubles
// pixel_size_m and ceil-halves the dimensions.
struct Pyramid {
    std::vector<Grid> levels;

    // Level whose pixel size matches within relative tolerance 1e-9, or -1.
    int level_at(double pixel_size_m) const;
};

// One smoothing pass: each output pixel is the mean of the valid pixels of
// its 2x2 parent block (partial blocks at odd edges average what exists);
// invalid only when all parents are invalid. Pixel size doubles and the
// origin moves half a parent pixel in each axis.
Grid downsample_halve(const Grid& g);

Pyramid build_pyramid(const Grid& g, int n_levels);

// Values of an ancestor level replicated onto the fine geometry.
Grid block_replicate(const Grid& coarse, const Grid& fine);

// (sigma0 - smoothed) / smoothed per fine pixel, with the coarse ancestor
// block-replicated to the fine grid. Invalid where either input is invalid
// or the smoothed value is <= 0.
Grid contrast(const Grid& fine, const Grid& coarse);

// SGRD binary grid format: "SGRD", version 0x01, then little-endian
// ncols u32, nrows u32, pixel_size_m f64, origin_lat f64, origin_lon f64,
// then nrows*ncols float32 values row-major (invalid = quiet NaN).
void write_sgrd(const Grid& g, const std::string& path);
Grid read_sgrd(const std::string& path);

// 8-bit binary PGM for visual inspection, plus a sidecar text file (same
// path + ".txt") stating the linear value scaling.
void write_pgm(const Grid& g, const std::string& path);

} // namespace sarfil
