#include "sarfil/stats.hpp"

#include <algorithm>
#include <cmath>

#include "sarfil/error.hpp"

namespace sarfil {

double mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double covariance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("covariance: length mismatch");
    const double mx = mean(x), my = mean(y);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("pearson: length mismatch");
    if (x.size() < 2) throw DataError("pearson: need at least 2 samples");
    const double vx = variance(x), vy = variance(y);
    if (vx <= 0.0 || vy <= 0.0)
        throw DataError("pearson: undefined correlation (zero variance)");
    return covariance(x, y) / std::sqrt(vx * vy);
}

double dcor(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("dcor: length mismatch");
    const std::size_t n = x.size();
    if (n < 4) throw DataError("dcor: need at least 4 samples");
    const double dn = static_cast<double>(n);

    // Row means and grand means of the distance matrices.
    std::vector<double> arow(n, 0.0), brow(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sa = 0.0, sb = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            sa += std::abs(x[i] - x[j]);
            sb += std::abs(y[i] - y[j]);
        }
        arow[i] = sa / dn;
        brow[i] = sb / dn;
    }
    double agrand = 0.0, bgrand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        agrand += arow[i];
        bgrand += brow[i];
    }
    agrand /= dn;
    bgrand /= dn;

    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double a = std::abs(x[i] - x[j]) - arow[i] - arow[j] + agrand;
            const double b = std::abs(y[i] - y[j]) - brow[i] - brow[j] + bgrand;
            sab += a * b;
            saa += a * a;
            sbb += b * b;
        }
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    // dCor^2 = dCov^2 / sqrt(dVar_x dVar_y); the 1/n^2 factors cancel.
    const double r2 = sab / std::sqrt(saa * sbb);
    return r2 <= 0.0 ? 0.0 : std::sqrt(std::min(r2, 1.0));
}

ModelSolution solve_measurement_model(const PairedSeries& s, int delta_h) {
    const std::size_t n = s.size();
    if (n < 8) throw DataError("solve_measurement_model: need at least 8 samples");
    auto it = s.lags.find(delta_h);
    if (it == s.lags.end())
        throw DataError("solve_measurement_model: no lag set for delta " +
                        std::to_string(delta_h) + " h");
    const LagSet& lag = it->second;
    if (lag.m2.size() != n || lag.m1.size() != n || lag.p1.size() != n ||
        lag.p2.size() != n)
        throw DataError("solve_measurement_model: incomplete lag series");

    ModelSolution sol;
    const double var_c = variance(s.c);
    const double var_u = variance(s.u0);
    if (var_c <= 0.0 || var_u <= 0.0) return sol;

    const double cov0 = covariance(s.c, s.u0);
    const double sigma_t2 = cov0 * cov0 / var_u;  // reverse regression value
    if (sigma_t2 <= 0.0) return sol;

    const double c1 = 0.5 * (covariance(s.c, lag.m1) + covariance(s.c, lag.p1));
    const double c2 = 0.5 * (covariance(s.c, lag.m2) + covariance(s.c, lag.p2));

    // B^2 + c2 B - 2 c1^2 = 0; the roots straddle zero. Take the root whose
    // sign matches c1 (falling back to the sign of Cov(C,U0)) so that
    // cos(omega delta) = c1/B lands in [0, 1].
    const double disc = std::sqrt(c2 * c2 + 8.0 * c1 * c1);
    const bool positive = c1 != 0.0 ? c1 > 0.0 : cov0 >= 0.0;
    double b = positive ? (-c2 + disc) / 2.0 : (-c2 - disc) / 2.0;
    if (b == 0.0) return sol;

    double sigma_eps2 = cov0 - b;
    const double tol = 1e-9 * std::max(var_c, var_u);
    if (sigma_eps2 < -tol) return sol;
    if (sigma_eps2 < 0.0) {
        // Numerical dust: fold it into B so Cov(C,U0) = B + sigma_eps2 holds.
        sigma_eps2 = 0.0;
        b = cov0;
    }

    const double beta = b / sigma_t2;
    double sigma_c2 = var_c - sigma_t2 - sigma_eps2;
    double sigma_u2 = var_u - beta * beta * sigma_t2 - sigma_eps2;
    if (sigma_c2 < -tol || sigma_u2 < -tol) return sol;
    sigma_c2 = std::max(sigma_c2, 0.0);
    sigma_u2 = std::max(sigma_u2, 0.0);

    sol.beta_u = beta;
    sol.sigma_t2 = sigma_t2;
    sol.sigma_eps2 = sigma_eps2;
    sol.sigma_c2 = sigma_c2;
    sol.sigma_u2 = sigma_u2;
    sol.omega = std::acos(std::clamp(c1 / b, -1.0, 1.0)) / delta_h;
    sol.alpha_u = mean(s.u0) - beta * mean(s.c);
    sol.available = true;
    return sol;
}

std::optional<std::pair<double, double>> decompose_pearson(
    const ModelSolution& sol, double var_c, double var_u) {
    if (!sol.available) return std::nullopt;
    if (var_c <= 0.0 || var_u <= 0.0) return std::nullopt;
    const double denom = std::sqrt(var_c * var_u);
    return std::pair<double, double>{sol.b() / denom, sol.sigma_eps2 / denom};
}

} // namespace sarfil
