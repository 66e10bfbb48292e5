#pragma once

// DKW bands and the distribution-free IM for a one-sample distribution F:
// α(x,F) = min{1, 2exp(−2n‖F̂ − F‖²)}, π_x(F) = P{KS_n ≥ ‖F̂ − F‖}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "imkit/association.hpp"
#include "imkit/error.hpp"
#include "imkit/np/ecdf.hpp"
#include "imkit/procedures.hpp"
#include "imkit/random_set.hpp"
#include "imkit/universal/grenander.hpp"

namespace imkit {

inline double dkw_delta(std::size_t n, double alpha) {
    if (alpha <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

struct DkwBand {
    std::vector<double> t;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> ecdf;
    double delta = 0.0;
    bool degenerate = false;
};

/// F̂ ± δ_{n,α} clamped to [0,1] at each distinct observation.
inline DkwBand dkw_band(const EmpiricalSample& s, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("dkw_band: alpha must lie in [0,1]");
    DkwBand b;
    b.delta = dkw_delta(s.n(), alpha);
    b.degenerate = alpha == 0.0 || alpha == 1.0;
    const auto& v = s.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
        const double f = s.cdf(v[i]);
        b.t.push_back(v[i]);
        b.ecdf.push_back(f);
        b.lower.push_back(std::max(0.0, f - b.delta));
        b.upper.push_back(std::min(1.0, f + b.delta));
    }
    return b;
}

inline double dkw_index_from_distance(std::size_t n, double d) {
    return std::min(1.0, 2.0 * std::exp(-2.0 * static_cast<double>(n) * d * d));
}

/// DKW family C_α(x) = {F : ‖F̂_x − F‖∞ ≤ δ_{n,α}} on ParameterPoints carrying F.
inline ConfidenceFamily dkw_family() {
    ConfidenceFamily c;
    c.name = "DKW";
    c.contains = [](double alpha, const Sample& x, const ParameterPoint& F) {
        const EmpiricalSample s(x);
        return ks_distance(s, F.distribution()) <= dkw_delta(s.n(), alpha);
    };
    return c;
}

/// For continuous F the focal sets {u : ‖Ĝ_u − Unif‖∞ ≤ δ_{n,α}} do not depend on F.
inline RandomSetLaw dkw_random_set(std::size_t n) {
    const Association a = builtin_association(AssociationKind::iid_quantile, {.n = static_cast<int>(n)});
    RandomSetLaw law;
    law.sample_u = a.sample_u;
    law.focal.level = [n](const ParameterPoint&, const Sample& u) {
        std::vector<double> sorted(u);
        std::sort(sorted.begin(), sorted.end());
        return dkw_index_from_distance(n, ks_uniform_sorted(sorted));
    };
    law.focal.contains = [lvl = law.focal.level](double alpha, const ParameterPoint& th, const Sample& u) {
        return lvl(th, u) >= alpha;
    };
    law.focal.invariance_key = [](const ParameterPoint&) { return std::vector<double>{}; };
    return law;
}

inline IndexEvaluator dkw_index_evaluator() {
    return [](const Sample& x, const ParameterPoint& F) -> IndexResult {
        const EmpiricalSample s(x);
        return {dkw_index_from_distance(s.n(), ks_distance(s, F.distribution())), true};
    };
}

/// Reusable DKW IM for samples of size n: the KS reference table is built once.
class DkwIm {
public:
    DkwIm(std::size_t n, const McConfig& mc)
        : n_(n), engine_(std::make_shared<const PlausibilityEngine>(dkw_random_set(n), mc)),
          index_(dkw_index_evaluator()) {
        if (n == 0) throw ConfigError("DkwIm: n must be positive");
    }

    std::size_t n() const { return n_; }
    const PlausibilityEngine& engine() const { return *engine_; }

    PointPlausibility plausibility(const EmpiricalSample& s, const DistributionHandle& F) const {
        if (s.n() != n_) throw ConfigError("DkwIm: sample size differs from the reference table");
        return point_plausibility(*engine_, index_, s.values(), ParameterPoint(F));
    }

private:
    std::size_t n_;
    std::shared_ptr<const PlausibilityEngine> engine_;
    IndexEvaluator index_;
};

inline PointPlausibility dkw_plausibility(const EmpiricalSample& s, const DistributionHandle& F, const McConfig& mc) {
    return DkwIm(s.n(), mc).plausibility(s, F);
}

/// Informal monotone-density check: DKW plausibility of the Grenander fit.
/// No validity claim is attached to a test based on it.
inline PointPlausibility grenander_plugin_plausibility(const EmpiricalSample& s, const McConfig& mc) {
    if (s.values().front() < 0.0) throw DomainError("grenander_plugin_plausibility: data must be nonnegative");
    const GrenanderFit g = fit_grenander(s.values());
    return dkw_plausibility(s, g.handle(), mc);
}

}  // namespace imkit
