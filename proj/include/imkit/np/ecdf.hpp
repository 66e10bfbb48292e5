#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "imkit/error.hpp"
#include "imkit/point.hpp"

namespace imkit {

/// Sorted one-sample data with its empirical distribution function.
class EmpiricalSample {
public:
    explicit EmpiricalSample(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) throw ConfigError("EmpiricalSample: need at least one observation");
        for (double v : values_)
            if (!std::isfinite(v)) throw ConfigError("EmpiricalSample: observations must be finite");
        std::sort(values_.begin(), values_.end());
    }

    std::size_t n() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }

    /// F̂(t) = #{x_i ≤ t}/n.
    double cdf(double t) const {
        return static_cast<double>(std::upper_bound(values_.begin(), values_.end(), t) - values_.begin()) /
               static_cast<double>(n());
    }

    /// F̂(t−) = #{x_i < t}/n.
    double cdf_left(double t) const {
        return static_cast<double>(std::lower_bound(values_.begin(), values_.end(), t) - values_.begin()) /
               static_cast<double>(n());
    }

    /// Generalized inverse inf{t : F̂(t) ≥ p}.
    double quantile(double p) const {
        if (p <= 0.0) return values_.front();
        const auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n()) - 1e-12));
        return values_[std::clamp<std::size_t>(k, 1, n()) - 1];
    }

    DistributionHandle handle() const {
        auto self = std::make_shared<const EmpiricalSample>(*this);
        DistributionHandle h;
        h.kind = DistributionKind::ecdf;
        h.cdf = [self](double t) { return self->cdf(t); };
        h.cdf_left = [self](double t) { return self->cdf_left(t); };
        h.quantile = [self](double p) { return self->quantile(p); };
        h.label = "ecdf";
        return h;
    }

private:
    std::vector<double> values_;
};

/// sup_t |F̂(t) − F(t)|. Between jumps F̂ is flat and F monotone, so the sup is
/// reached at a jump point, from the right or from the left.
inline double ks_distance(const EmpiricalSample& s, const DistributionHandle& F) {
    const auto& v = s.values();
    const double n = static_cast<double>(s.n());
    double d = 0.0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
        const double below = static_cast<double>(i) / n;
        const double at = static_cast<double>(j + 1) / n;
        d = std::max({d, std::abs(at - F.cdf(v[i])), std::abs(below - F.left_limit(v[i]))});
        i = j + 1;
    }
    return d;
}

/// KS distance of sorted uniform draws from the Unif(0,1) distribution function.
inline double ks_uniform_sorted(const std::vector<double>& u) {
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        d = std::max({d, static_cast<double>(i + 1) / n - u[i], u[i] - static_cast<double>(i) / n});
    return d;
}

}  // namespace imkit
