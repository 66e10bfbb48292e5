#pragma once

// Gaussian kernel density estimate on the log scale, back-transformed to
// (0, ∞) with the Jacobian 1/x.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include "imkit/error.hpp"
#include "imkit/point.hpp"
#include "imkit/special.hpp"

namespace imkit {

struct LogKde {
    std::vector<double> centres;  // log data, sorted
    double bandwidth = 1.0;

    double density(double t) const {
        if (!(t > 0.0)) return 0.0;
        const double y = std::log(t);
        double s = 0.0;
        for (double c : centres) s += dist::normal_pdf((y - c) / bandwidth);
        return s / (static_cast<double>(centres.size()) * bandwidth * t);
    }

    double cdf(double t) const {
        if (!(t > 0.0)) return 0.0;
        const double y = std::log(t);
        double s = 0.0;
        for (double c : centres) s += dist::normal_cdf((y - c) / bandwidth);
        return s / static_cast<double>(centres.size());
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
        auto self = std::make_shared<const LogKde>(*this);
        DistributionHandle h;
        h.kind = DistributionKind::kde;
        h.cdf = [self](double t) { return self->cdf(t); };
        h.density = [self](double t) { return self->density(t); };
        h.quantile = [self](double p) {
            if (p <= 0.0) return 0.0;
            if (p >= 1.0) return std::numeric_limits<double>::infinity();
            double lo = self->centres.front() - 40.0 * self->bandwidth;
            double hi = self->centres.back() + 40.0 * self->bandwidth;
            for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (self->cdf(std::exp(mid)) < p)
                    lo = mid;
                else
                    hi = mid;
            }
            return std::exp(0.5 * (lo + hi));
        };
        h.label = "log-kde";
        return h;
    }
};

/// Silverman's rule 0.9·min(sd, IQR/1.34)·n^{-1/5} on the log data; when it
/// degenerates, 1.06·max(sd, 1e-6)·n^{-1/5}.
inline double silverman_bandwidth(const std::vector<double>& sorted) {
    const double n = static_cast<double>(sorted.size());
    double mean = 0.0;
    for (double v : sorted) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    const double sd = sorted.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    auto q = [&](double p) {
        const double h = (n - 1.0) * p;
        const auto i = static_cast<std::size_t>(std::floor(h));
        const double frac = h - static_cast<double>(i);
        return i + 1 < sorted.size() ? sorted[i] + frac * (sorted[i + 1] - sorted[i]) : sorted[i];
    };
    const double iqr = q(0.75) - q(0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd > 0.0 ? sd : (iqr > 0.0 ? iqr / 1.34 : 0.0);
    const double h = 0.9 * spread * std::pow(n, -0.2);
    if (h > 0.0 && std::isfinite(h)) return h;
    return 1.06 * std::max(sd, 1e-6) * std::pow(n, -0.2);
}

inline LogKde fit_log_kde(const std::vector<double>& x) {
    if (x.empty()) throw ConfigError("fit_log_kde: empty sample");
    LogKde k;
    k.centres.reserve(x.size());
    for (double v : x) {
        if (!(v > 0.0)) throw DomainError("fit_log_kde: data must be strictly positive");
        k.centres.push_back(std::log(v));
    }
    std::sort(k.centres.begin(), k.centres.end());
    k.bandwidth = silverman_bandwidth(k.centres);
    return k;
}

}  // namespace imkit
