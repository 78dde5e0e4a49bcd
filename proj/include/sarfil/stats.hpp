#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace sarfil {

// Moments with 1/n normalization, used consistently across this module.
double mean(std::span<const double> x);
double variance(std::span<const double> x);
double covariance(std::span<const double> x, std::span<const double> y);

// Wind samples at offsets {-2d, -d, +d, +2d} around each overpass.
struct LagSet {
    std::vector<double> m2, m1, p1, p2;
};

// Matched contrast/wind series for one domain, with lagged wind per
// sampling interval. Wind restriction to [1, 10] m/s is applied upstream.
struct PairedSeries {
    std::vector<double> c;
    std::vector<double> u0;
    std::vector<std::int64_t> t_hour;
    std::map<int, LagSet> lags;  // keyed by delta_h

    std::size_t size() const { return c.size(); }
};

// Sample Pearson correlation. Throws DataError for length < 2 or zero
// variance in either argument.
double pearson(std::span<const double> x, std::span<const double> y);

// Sample distance correlation in [0, 1] from double-centered pairwise
// distance matrices (0 when either distance variance vanishes). O(n^2)
// time, O(n) memory. Throws DataError for length < 4.
double dcor(std::span<const double> x, std::span<const double> y);

// Solution of the signal-plus-noise measurement model relating C and U:
//   C      = t + eps + eps_C
//   U      = alpha_U + beta_U t + eps + eps_U
// with sigma_t^2 fixed to the reverse-regression value and the remaining
// moments closed by a wavelike lag covariance Cov(C, U_k) = B cos(k omega
// delta) for k != 0, B = beta_U sigma_t^2.
struct ModelSolution {
    double beta_u = 0.0;
    double alpha_u = 0.0;
    double sigma_t2 = 0.0;
    double sigma_eps2 = 0.0;
    double sigma_c2 = 0.0;
    double sigma_u2 = 0.0;
    double omega = 0.0;  // radians/hour
    bool available = false;

    double b() const { return beta_u * sigma_t2; }
};

ModelSolution solve_measurement_model(const PairedSeries& s, int delta_h);

// (linear, nonlinear) = (beta_U sigma_t^2, sigma_eps^2) / sqrt(varC varU).
// Absent when the solution is unavailable.
std::optional<std::pair<double, double>> decompose_pearson(
    const ModelSolution& sol, double var_c, double var_u);

} // namespace sarfil
