#pragma once

// Confidence-distribution probabilities for the false-confidence
// comparisons: Π_x = N(x, 1) on the line and Π_x = N₂(x, I₂) on the plane.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "imkit/rng.hpp"
#include "imkit/special.hpp"

namespace imkit::models {

/// Π_x{ϑ : |ϑ| ≤ c} under N(x, 1).
inline double cd_abs_probability(double x, double c) {
    if (c <= 0.0) return 0.0;
    return dist::normal_cdf(c - x) - dist::normal_cdf(-c - x);
}

/// Π_x{(−∞, c]} under N(x, 1).
inline double cd_half_line_probability(double x, double c) { return dist::normal_cdf(c - x); }

/// z-interval contour 2{1 − Φ(|x − ϑ|)} for a single N(θ, 1) observation.
inline double scalar_contour(double x, double theta) {
    return 2.0 * (1.0 - dist::normal_cdf(std::abs(x - theta)));
}

/// sup of the scalar contour over [lo, hi].
inline double scalar_upper_interval(double x, double lo, double hi) {
    if (x >= lo && x <= hi) return 1.0;
    return scalar_contour(x, x < lo ? lo : hi);
}

/// Monte Carlo estimate of Π_x^φ{(−∞, c]} for φ = ϑ₁/ϑ₂ under N₂(x, I₂):
/// the proportion of draws whose ratio is at most c. The draws are fixed at
/// construction so every x sees the same noise.
class RatioCdProbe {
public:
    RatioCdProbe(std::size_t m, std::uint64_t seed) {
        RngStream rng(seed, 0x5cd);
        z_.reserve(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double a = rng.normal();
            z_.emplace_back(a, rng.normal());
        }
    }

    double below(double x1, double x2, double c) const {
        std::size_t hits = 0;
        for (const auto& [a, b] : z_) {
            const double t1 = x1 + a, t2 = x2 + b;
            // t1/t2 ≤ c without dividing.
            if ((t2 > 0.0 && t1 <= c * t2) || (t2 < 0.0 && t1 >= c * t2)) ++hits;
        }
        return static_cast<double>(hits) / static_cast<double>(z_.size());
    }

    std::size_t size() const { return z_.size(); }

private:
    std::vector<std::pair<double, double>> z_;
};

}  // namespace imkit::models
