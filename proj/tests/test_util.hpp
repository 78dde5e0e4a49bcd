#pragma once

// Test-only oracles and fixture helpers. Everything here is written as an
// independent path from the library implementations it checks: direct
// formula transliterations, brute-force enumeration, and full-matrix
// computations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sarfil/grid.hpp"
#include "sarfil/rng.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
    return std::string(SARFIL_DATA_DIR) + "/" + name;
}

// Fresh scratch directory under the working directory.
inline std::string scratch_dir(const std::string& name) {
    const std::string dir = "scratch_" + name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

// Compensated mean, used where tests compare means at 1e-12.
inline double kahan_mean(const std::vector<double>& v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

inline double grid_mean_valid(const sarfil::Grid& g) {
    std::vector<double> vals;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.valid[k]) vals.push_back(g.values[k]);
    return kahan_mean(vals);
}

inline sarfil::Grid random_grid(sarfil::SplitMix64& rng, int nrows, int ncols,
                                double pixel = 100.0, double invalid_frac = 0.0) {
    sarfil::Grid g(nrows, ncols, pixel, 48.0, -63.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        g.values[k] = rng.next_uniform(0.0, 2.0);
        if (invalid_frac > 0.0 && rng.next_double() < invalid_frac) {
            g.values[k] = 0.0;
            g.valid[k] = 0;
        }
    }
    return g;
}

// ---- scalar block-mean oracle -------------------------------------------

// Mean over the valid members of one 2x2 (possibly clipped) block.
struct BlockMean {
    double value = 0.0;
    bool valid = false;
};
inline BlockMean block_mean_oracle(const sarfil::Grid& g, int bi, int bj) {
    double sum = 0.0;
    int count = 0;
    for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj) {
            const int r = 2 * bi + di, c = 2 * bj + dj;
            if (r >= g.nrows || c >= g.ncols) continue;
            if (!g.is_valid(r, c)) continue;
            sum += g.at(r, c);
            ++count;
        }
    if (count == 0) return {};
    return {sum / count, true};
}

// ---- flood-fill labeling oracle ------------------------------------------

// Breadth-first flood fill over the valid nonzero pixels; labels assigned
// in scan order of the component seeds.
inline std::vector<int> flood_fill_oracle(const sarfil::Grid& g, int connectivity) {
    std::vector<int> labels(g.size(), 0);
    auto fg = [&g](int r, int c) { return g.is_valid(r, c) && g.at(r, c) != 0.0; };
    int next = 0;
    std::deque<std::pair<int, int>> queue;
    for (int si = 0; si < g.nrows; ++si) {
        for (int sj = 0; sj < g.ncols; ++sj) {
            if (!fg(si, sj) || labels[g.idx(si, sj)] != 0) continue;
            ++next;
            labels[g.idx(si, sj)] = next;
            queue.push_back({si, sj});
            while (!queue.empty()) {
                const auto [r, c] = queue.front();
                queue.pop_front();
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (dr == 0 && dc == 0) continue;
                        if (connectivity == 4 && dr != 0 && dc != 0) continue;
                        const int nr = r + dr, nc = c + dc;
                        if (nr < 0 || nr >= g.nrows || nc < 0 || nc >= g.ncols)
                            continue;
                        if (!fg(nr, nc) || labels[g.idx(nr, nc)] != 0) continue;
                        labels[g.idx(nr, nc)] = next;
                        queue.push_back({nr, nc});
                    }
                }
            }
        }
    }
    return labels;
}

// ---- all-pairs span oracle -----------------------------------------------

inline double span_all_pairs_oracle(const std::vector<std::pair<int, int>>& pixels,
                                    double pixel_size_m) {
    long long best = 0;
    for (std::size_t i = 0; i < pixels.size(); ++i)
        for (std::size_t j = i + 1; j < pixels.size(); ++j) {
            const long long dr = pixels[i].first - pixels[j].first;
            const long long dc = pixels[i].second - pixels[j].second;
            best = std::max(best, dr * dr + dc * dc);
        }
    return std::sqrt(static_cast<double>(best)) * pixel_size_m;
}

// ---- direct-summation correlation oracles --------------------------------

inline double pearson_oracle(const std::vector<double>& x,
                             const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxy += x[i] * y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
    }
    const double cov = sxy / n - (sx / n) * (sy / n);
    const double vx = sxx / n - (sx / n) * (sx / n);
    const double vy = syy / n - (sy / n) * (sy / n);
    return cov / std::sqrt(vx * vy);
}

// Full-matrix double centering, materialized.
inline double dcor_oracle(const std::vector<double>& x,
                          const std::vector<double>& y) {
    const std::size_t n = x.size();
    const double dn = static_cast<double>(n);
    std::vector<double> a(n * n), b(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            a[i * n + j] = std::abs(x[i] - x[j]);
            b[i * n + j] = std::abs(y[i] - y[j]);
        }
    auto center = [n, dn](std::vector<double>& m) {
        std::vector<double> row(n, 0.0), col(n, 0.0);
        double grand = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                row[i] += m[i * n + j];
                col[j] += m[i * n + j];
                grand += m[i * n + j];
            }
        for (std::size_t i = 0; i < n; ++i) row[i] /= dn;
        for (std::size_t j = 0; j < n; ++j) col[j] /= dn;
        grand /= dn * dn;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                m[i * n + j] += grand - row[i] - col[j];
    };
    center(a);
    center(b);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t k = 0; k < n * n; ++k) {
        sab += a[k] * b[k];
        saa += a[k] * a[k];
        sbb += b[k] * b[k];
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    const double dcov2 = sab / (dn * dn);
    const double dvar = std::sqrt((saa / (dn * dn)) * (sbb / (dn * dn)));
    const double r2 = dcov2 / dvar;
    return r2 <= 0.0 ? 0.0 : std::sqrt(r2);
}

// Population distance correlation of a bivariate normal pair at correlation
// rho (closed form, evaluated numerically).
inline double bvn_dcor_oracle(double rho) {
    const double r = std::abs(rho);
    const double num = r * std::asin(r) + std::sqrt(1.0 - r * r) -
                       r * std::asin(r / 2.0) - std::sqrt(4.0 - r * r) + 1.0;
    const double den = 1.0 + 3.141592653589793 / 3.0 - std::sqrt(3.0);
    const double r2 = num / den;
    return r2 <= 0.0 ? 0.0 : std::sqrt(r2);
}

// ---- independent CMOD5 transliteration -----------------------------------

// Direct restatement of the published piecewise formula, 1-indexed like the
// reference code; kept deliberately separate from the library version.
inline double cmod5_reference(const std::vector<double>& coef, double V,
                              double PHI_DEG, double THETA) {
    std::vector<double> C(29, 0.0);
    for (int i = 1; i <= 28; ++i) C[static_cast<std::size_t>(i)] = coef[static_cast<std::size_t>(i - 1)];
    const double DTOR = 180.0 / 3.14159265358979323846;
    const double THETM = 40.0, THETHR = 25.0, ZPOW = 1.6;

    const double Y0 = C[19], PN = C[20];
    const double A = C[19] - (C[19] - 1.0) / C[20];
    const double B = 1.0 / (C[20] * std::pow(C[19] - 1.0, C[20] - 1.0));

    const double FI = PHI_DEG / DTOR;
    const double CSFI = std::cos(FI);
    const double CS2FI = 2.0 * CSFI * CSFI - 1.0;

    const double X = (THETA - THETM) / THETHR;
    const double XX = X * X;

    const double A0 = C[1] + C[2] * X + C[3] * XX + C[4] * X * XX;
    const double A1 = C[5] + C[6] * X;
    const double A2 = C[7] + C[8] * X;
    const double GAM = C[9] + C[10] * X + C[11] * XX;
    const double S0 = C[12] + C[13] * X;
    const double S = A2 * V;

    double A3;
    if (S >= S0) {
        A3 = 1.0 / (1.0 + std::exp(-S));
    } else {
        const double G0 = 1.0 / (1.0 + std::exp(-S0));
        A3 = G0 * std::pow(S / S0, S0 * (1.0 - G0));
    }
    const double B0 = std::pow(A3, GAM) * std::pow(10.0, A0 + A1 * V);

    double B1 = C[15] * V * (0.5 + X - std::tanh(4.0 * (X + C[16] + C[17] * V)));
    B1 = (C[14] * (1.0 + X) - B1) / (std::exp(0.34 * (V - C[18])) + 1.0);

    const double V0 = C[21] + C[22] * X + C[23] * XX;
    const double D1 = C[24] + C[25] * X + C[26] * XX;
    const double D2 = C[27] + C[28] * X;
    double V2 = V / V0 + 1.0;
    if (V2 < Y0) V2 = A + B * std::pow(V2 - 1.0, PN);
    const double B2 = (-D1 + D2 * V2) * std::exp(-V2);

    double bracket = 1.0 + B1 * CSFI + B2 * CS2FI;
    if (bracket < 0.0) bracket = 0.0;
    return B0 * std::pow(bracket, ZPOW);
}

} // namespace testutil
