#pragma once

// Grenander estimator: the nonparametric MLE of a non-increasing density on
// [0, ∞), the left derivative of the least concave majorant of the ECDF.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "imkit/error.hpp"
#include "imkit/point.hpp"

namespace imkit {

struct GrenanderFit {
    std::vector<double> knots;    // 0 = k₀ < k₁ < ... < k_m = max(x)
    std::vector<double> cum;      // LCM values at the knots, cum[0] = 0, cum[m] = 1
    std::vector<double> heights;  // heights[i] is the density on (k_i, k_{i+1}]

    /// Left-continuous: an observation at a knot gets the height to its left.
    double density(double t) const {
        if (t <= 0.0 || t > knots.back()) return 0.0;
        const auto it = std::lower_bound(knots.begin() + 1, knots.end(), t);
        return heights[static_cast<std::size_t>(it - knots.begin()) - 1];
    }

    double cdf(double t) const {
        if (t <= 0.0) return 0.0;
        if (t >= knots.back()) return 1.0;
        const auto it = std::upper_bound(knots.begin(), knots.end(), t);
        const auto i = static_cast<std::size_t>(it - knots.begin()) - 1;
        return cum[i] + heights[i] * (t - knots[i]);
    }

    double quantile(double p) const {
        if (p <= 0.0) return 0.0;
        if (p >= 1.0) return knots.back();
        const auto it = std::upper_bound(cum.begin(), cum.end(), p);
        const auto i = std::min(static_cast<std::size_t>(it - cum.begin()) - 1, heights.size() - 1);
        return knots[i] + (p - cum[i]) / heights[i];
    }

    double log_likelihood(const std::vector<double>& x) const {
        double s = 0.0;
        for (double v : x) {
            const double f = density(v);
            if (!(f > 0.0)) return -std::numeric_limits<double>::infinity();
            s += std::log(f);
        }
        return s;
    }

    DistributionHandle handle() const {
        auto self = std::make_shared<const GrenanderFit>(*this);
        DistributionHandle h;
        h.kind = DistributionKind::grenander;
        h.cdf = [self](double t) { return self->cdf(t); };
        h.quantile = [self](double p) { return self->quantile(p); };
        h.density = [self](double t) { return self->density(t); };
        h.label = "grenander";
        return h;
    }
};

/// Upper concave hull of (0,0) and the ECDF corners (t_j, F̂(t_j)), one pass.
inline GrenanderFit fit_grenander(std::vector<double> x) {
    if (x.empty()) throw ConfigError("fit_grenander: empty sample");
    std::sort(x.begin(), x.end());
    if (x.front() < 0.0) throw DomainError("fit_grenander: data must be nonnegative");
    if (x.front() == 0.0) throw DomainError("fit_grenander: an observation at zero gives an unbounded density");
    const double n = static_cast<double>(x.size());

    std::vector<double> px{0.0}, py{0.0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i + 1 < x.size() && x[i + 1] == x[i]) continue;
        const double y = static_cast<double>(i + 1) / n;
        // Pop while the last hull point lies on or below the chord to the new point.
        while (px.size() >= 2) {
            const std::size_t k = px.size();
            const double s_prev = (py[k - 1] - py[k - 2]) / (px[k - 1] - px[k - 2]);
            const double s_new = (y - py[k - 1]) / (x[i] - px[k - 1]);
            if (s_new >= s_prev)
                px.pop_back(), py.pop_back();
            else
                break;
        }
        px.push_back(x[i]);
        py.push_back(y);
    }
    GrenanderFit g;
    g.knots = std::move(px);
    g.cum = std::move(py);
    g.cum.back() = 1.0;
    g.heights.resize(g.knots.size() - 1);
    for (std::size_t i = 0; i + 1 < g.knots.size(); ++i)
        g.heights[i] = (g.cum[i + 1] - g.cum[i]) / (g.knots[i + 1] - g.knots[i]);
    return g;
}

}  // namespace imkit
