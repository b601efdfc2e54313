#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "terra/angles.hpp"
#include "terra/rng.hpp"

namespace terra {

/// Mean station count of a Poisson field within range radius_m of a point,
/// for a density given in stations per square kilometre.
inline double mean_in_range(double lambda_per_km2, double radius_m) {
    if (lambda_per_km2 < 0) throw std::invalid_argument("density must be non-negative");
    if (radius_m <= 0) throw std::invalid_argument("radius must be positive");
    double r_km = radius_m / 1000.0;
    return lambda_per_km2 * kPi * r_km * r_km;
}

/// P(at least k stations within range) under the Poisson field.
inline double coverage_probability(double lambda_per_km2, double radius_m, int k) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    double mu = mean_in_range(lambda_per_km2, radius_m);
    double term = std::exp(-mu); // i = 0
    double below = term;
    for (int i = 1; i < k; ++i) {
        term *= mu / i;
        below += term;
    }
    return 1.0 - below;
}

/// Smallest density (stations/km^2) with coverage_probability >= target.
/// Bisection on the density; the probability is monotone in it.
inline double min_density(double radius_m, int k, double target, double rel_tol = 1e-6) {
    if (target <= 0.0 || target >= 1.0) throw std::invalid_argument("target must lie in (0, 1)");
    double lo = 0.0;
    double hi = 1.0;
    while (coverage_probability(hi, radius_m, k) < target) {
        hi *= 2.0;
        if (hi > 1e12) throw std::runtime_error("density search failed to bracket the target");
    }
    while (hi - lo > rel_tol * hi) {
        double mid = 0.5 * (lo + hi);
        if (coverage_probability(mid, radius_m, k) >= target) hi = mid;
        else lo = mid;
    }
    return hi;
}

struct DensityRow {
    double radius_m = 0;
    double lambda_per_km2 = 0;
    double prob = 0;
};

inline std::vector<DensityRow> density_grid(double radius_m, int k, double lambda_lo,
                                            double lambda_hi, int points) {
    if (points < 2) throw std::invalid_argument("grid needs at least two points");
    if (lambda_hi <= lambda_lo) throw std::invalid_argument("grid bounds are inverted");
    std::vector<DensityRow> rows;
    rows.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        double lam = lambda_lo + (lambda_hi - lambda_lo) * i / (points - 1);
        rows.push_back({radius_m, lam, coverage_probability(lam, radius_m, k)});
    }
    return rows;
}

inline std::string density_csv(const std::vector<DensityRow>& rows) {
    std::ostringstream os;
    os << "R_m,lambda_per_km2,prob\n";
    os.precision(10);
    for (const DensityRow& r : rows)
        os << r.radius_m << "," << r.lambda_per_km2 << "," << r.prob << "\n";
    return os.str();
}

/// Monte Carlo check: scatter a Poisson number of stations over the bounding
/// square and count how many land within range. Deliberately avoids the
/// closed form so the two can validate each other.
inline double mc_coverage(double lambda_per_km2, double radius_m, int k, int trials,
                          std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("trials must be positive");
    Rng rng(derive_seed(seed, 0xDE));
    double r_km = radius_m / 1000.0;
    double side = 2.0 * r_km;
    double mu_square = lambda_per_km2 * side * side;
    long long hits = 0;
    for (int t = 0; t < trials; ++t) {
        auto n = rng.poisson(mu_square);
        int in_range = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            double x = rng.uniform(-r_km, r_km);
            double y = rng.uniform(-r_km, r_km);
            if (x * x + y * y <= r_km * r_km) in_range++;
        }
        if (in_range >= k) hits++;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

/// Published deployment guidance sometimes quotes far sparser grids for
/// 100 m spacing than the k >= 2 closed form requires; kept as a note so
/// reports can flag the discrepancy instead of silently adopting it.
inline constexpr const char* kReportedDensityNote =
    "note: a commonly quoted figure of 30 stations/km^2 for 100 m spacing is "
    "unverified here; the k>=2 closed form requires a denser deployment";

} // namespace terra
