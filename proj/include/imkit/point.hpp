#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace imkit {

/// Observed data or an auxiliary-variable realization.
using Sample = std::vector<double>;

enum class DistributionKind { parametric, ecdf, grenander, kde };

inline const char* to_string(DistributionKind k) {
    switch (k) {
        case DistributionKind::parametric: return "parametric";
        case DistributionKind::ecdf: return "ecdf";
        case DistributionKind::grenander: return "grenander";
        case DistributionKind::kde: return "kde";
    }
    return "unknown";
}

/// A univariate distribution known through its CDF and generalized inverse.
///
/// `cdf_left(t)` is F(t-) and defaults to `cdf` for continuous F; the
/// sup-norm distance to an ECDF needs both one-sided limits.
struct DistributionHandle {
    DistributionKind kind = DistributionKind::parametric;
    std::function<double(double)> cdf;
    std::function<double(double)> quantile;
    std::function<double(double)> cdf_left;
    std::function<double(double)> density;
    std::string label;

    double left_limit(double t) const { return cdf_left ? cdf_left(t) : cdf(t); }
};

/// A point of the parameter space: a coordinate vector, or a distribution
/// function for nonparametric models.
class ParameterPoint {
public:
    ParameterPoint() = default;
    ParameterPoint(std::initializer_list<double> coords) : coords_(coords) {}
    explicit ParameterPoint(std::vector<double> coords) : coords_(std::move(coords)) {}
    explicit ParameterPoint(DistributionHandle dist)
        : distribution_(std::make_shared<const DistributionHandle>(std::move(dist))) {}
    explicit ParameterPoint(std::shared_ptr<const DistributionHandle> dist)
        : distribution_(std::move(dist)) {}

    std::size_t size() const { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    double& operator[](std::size_t i) { return coords_[i]; }
    const std::vector<double>& coords() const { return coords_; }

    bool has_distribution() const { return static_cast<bool>(distribution_); }
    const DistributionHandle& distribution() const { return *distribution_; }
    const std::shared_ptr<const DistributionHandle>& distribution_ptr() const {
        return distribution_;
    }

    friend bool operator==(const ParameterPoint& a, const ParameterPoint& b) {
        return a.coords_ == b.coords_ && a.distribution_ == b.distribution_;
    }

private:
    std::vector<double> coords_;
    std::shared_ptr<const DistributionHandle> distribution_;
};

}  // namespace imkit
