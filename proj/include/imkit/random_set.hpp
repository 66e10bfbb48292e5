#pragma once

// Nested random sets on the auxiliary space and the fused plausibility
// contour π(ϑ) = P_U{ℓ_ϑ(U) ≤ α(x,ϑ)}, ℓ_ϑ(u) = sup{α : u ∈ S_α(ϑ)}.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "imkit/contour.hpp"
#include "imkit/error.hpp"
#include "imkit/point.hpp"
#include "imkit/rng.hpp"

namespace imkit {

/// S_α(ϑ) as a membership predicate, nested: α ≤ α' ⇒ S_α'(ϑ) ⊆ S_α(ϑ).
struct FocalFamily {
    std::function<bool(double alpha, const ParameterPoint& theta, const Sample& u)> contains;
    /// ℓ_ϑ(u) in closed form; when empty, found by bisection on `contains`.
    std::function<double(const ParameterPoint& theta, const Sample& u)> level;
    /// ϑ's with equal keys share S_α(ϑ); an empty key means S_α is free of ϑ.
    /// Without this function no two ϑ share cached tables.
    std::function<std::vector<double>(const ParameterPoint& theta)> invariance_key;
    std::function<bool(const ParameterPoint& theta)> in_domain;
    std::vector<double> alpha_grid = default_alpha_grid();
    double level_tol = 1e-8;

    static std::vector<double> default_alpha_grid() {
        std::vector<double> g;
        for (int i = 0; i <= 100; ++i) g.push_back(i / 100.0);
        return g;
    }

    double level_of(const ParameterPoint& theta, const Sample& u) const {
        if (level) return std::clamp(level(theta, u), 0.0, 1.0);
        if (contains(1.0, theta, u)) return 1.0;
        if (!contains(0.0, theta, u)) return 0.0;
        double lo = 0.0, hi = 1.0;
        while (hi - lo > level_tol) {
            const double mid = 0.5 * (lo + hi);
            if (contains(mid, theta, u))
                lo = mid;
            else
                hi = mid;
        }
        return lo;
    }
};

struct RandomSetLaw {
    FocalFamily focal;
    std::function<Sample(RngStream&)> sample_u;
};

/// P_U{S_α(ϑ)} with its binomial standard error.
inline McEstimate coverage_probability(const RandomSetLaw& law, const ParameterPoint& theta, double alpha,
                                       const McConfig& mc) {
    mc.validate();
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("coverage_probability: alpha must lie in [0,1]");
    RngStream rng = mc.stream();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < mc.n_rep; ++i)
        if (law.focal.contains(alpha, theta, law.sample_u(rng))) ++hits;
    return McEstimate::proportion(hits, mc.n_rep);
}

/// α(x,ϑ); `defined` is false when no α gives S_α(ϑ) ∩ U_x(ϑ) ≠ ∅.
struct IndexResult {
    double alpha = 0.0;
    bool defined = true;
};

using IndexEvaluator = std::function<IndexResult(const Sample& x, const ParameterPoint& theta)>;

struct PointPlausibility {
    double value = 0.0;
    double alpha = 0.0;
    double std_error = 0.0;
    bool defined = true;
};

/// Common-random-number evaluator: one set of auxiliary draws shared by every
/// ϑ, with sorted level tables cached per invariance key. Thread-safe, and
/// reusable across data sets since the draws do not depend on x.
class PlausibilityEngine {
public:
    PlausibilityEngine(RandomSetLaw law, McConfig mc) : law_(std::move(law)), mc_(mc) {
        mc_.validate();
        if (!law_.sample_u) throw ConfigError("PlausibilityEngine: law has no sampler");
        if (!law_.focal.contains && !law_.focal.level)
            throw ConfigError("PlausibilityEngine: focal family has no membership");
    }

    const RandomSetLaw& law() const { return law_; }
    const McConfig& mc() const { return mc_; }
    std::size_t n_rep() const { return mc_.n_rep; }

    const std::vector<Sample>& draws() const {
        std::call_once(draws_once_, [this] {
            RngStream rng = mc_.stream();
            draws_.reserve(mc_.n_rep);
            for (std::size_t i = 0; i < mc_.n_rep; ++i) draws_.push_back(law_.sample_u(rng));
        });
        return draws_;
    }

    /// ℓ_ϑ(U_i) over all draws, ascending.
    std::shared_ptr<const std::vector<double>> levels(const ParameterPoint& theta) const {
        if (law_.focal.in_domain && !law_.focal.in_domain(theta))
            throw DomainError("parameter outside the focal family's domain");
        std::vector<double> key = law_.focal.invariance_key ? law_.focal.invariance_key(theta) : theta.coords();
        const bool cacheable = static_cast<bool>(law_.focal.invariance_key) || !theta.has_distribution();
        if (cacheable) {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        }
        const auto& u = draws();
        auto table = std::make_shared<std::vector<double>>(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) (*table)[i] = law_.focal.level_of(theta, u[i]);
        std::sort(table->begin(), table->end());
        if (cacheable) {
            std::lock_guard lock(mutex_);
            if (cache_.size() >= max_cache_) cache_.clear();
            cache_.emplace(std::move(key), table);
        }
        return table;
    }

    /// P_U{ℓ_ϑ(U) ≤ a}.
    McEstimate plausibility(const ParameterPoint& theta, double a) const {
        const auto t = levels(theta);
        const auto hits = static_cast<std::size_t>(
            std::upper_bound(t->begin(), t->end(), a + kLevelSlack) - t->begin());
        return McEstimate::proportion(hits, t->size());
    }

    /// P_U{S_α(ϑ)} = P_U{ℓ_ϑ(U) ≥ α} on the shared draws.
    McEstimate coverage(const ParameterPoint& theta, double alpha) const {
        const auto t = levels(theta);
        const auto below = static_cast<std::size_t>(
            std::lower_bound(t->begin(), t->end(), alpha - kLevelSlack) - t->begin());
        return McEstimate::proportion(t->size() - below, t->size());
    }

    void set_max_cache(std::size_t n) { max_cache_ = std::max<std::size_t>(n, 1); }

    // Closed-form levels and indices agree to rounding; this keeps ties on the
    // plateau side.
    static constexpr double kLevelSlack = 1e-12;

private:
    RandomSetLaw law_;
    McConfig mc_;
    mutable std::once_flag draws_once_;
    mutable std::vector<Sample> draws_;
    mutable std::mutex mutex_;
    mutable std::map<std::vector<double>, std::shared_ptr<const std::vector<double>>> cache_;
    std::size_t max_cache_ = 4096;
};

/// π(ϑ) = P_U{ℓ_ϑ(U) ≤ α(x,ϑ)}; never exceeds α(x,ϑ) beyond MC error.
inline PointPlausibility point_plausibility(const PlausibilityEngine& engine, const IndexEvaluator& index,
                                            const Sample& x, const ParameterPoint& theta) {
    PointPlausibility out;
    const IndexResult a = index(x, theta);
    out.alpha = a.alpha;
    out.defined = a.defined;
    if (!a.defined) return out;
    if (a.alpha >= 1.0) {
        out.value = 1.0;
        return out;
    }
    const McEstimate e = engine.plausibility(theta, a.alpha);
    out.value = e.value;
    out.std_error = e.std_error;
    return out;
}

/// Fused contour over `domain`, sharing the engine's draws across ϑ.
inline Contour fused_contour(std::shared_ptr<const PlausibilityEngine> engine, IndexEvaluator index, Sample x,
                             Domain domain, std::string label = "fused IM contour") {
    Contour c;
    c.domain = std::move(domain);
    c.label = std::move(label);
    c.mc_meta = McMeta{engine->n_rep(), engine->mc().seed, "common random numbers across parameter values"};
    c.eval = [engine, index = std::move(index), x = std::move(x)](const ParameterPoint& th) {
        return point_plausibility(*engine, index, x, th).value;
    };
    return c;
}

struct FusedSupCheck {
    double sup = 0.0;
    double std_error = 0.0;
    bool ok = true;
    std::string message;
};

/// The fused contour should reach 1; a sup below 1 − 3·se on the grid hints
/// that focal sets and data are incompatible. Reported, never renormalized.
inline FusedSupCheck check_fused_sup(const Contour& c, std::size_t n_rep, const SupOptions& opt = {}) {
    FusedSupCheck r;
    r.sup = sup_over(c, Assertion::whole(), opt).value;
    const double p = std::clamp(r.sup, 1.0 / static_cast<double>(n_rep), 1.0 - 1.0 / static_cast<double>(n_rep));
    r.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n_rep));
    r.ok = r.sup >= 1.0 - 3.0 * r.std_error;
    if (!r.ok)
        r.message = "fused contour sup " + std::to_string(r.sup) +
                    " is below 1 - 3 se; the compatibility condition may fail for this data";
    return r;
}

}  // namespace imkit
