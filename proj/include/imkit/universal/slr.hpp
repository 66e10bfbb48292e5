#pragma once

// Split likelihood ratio procedures and the closed-form normal-mean IM.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <vector>

#include "imkit/association.hpp"
#include "imkit/contour.hpp"
#include "imkit/error.hpp"
#include "imkit/random_set.hpp"
#include "imkit/universal/split.hpp"

namespace imkit {

using Params = std::vector<double>;

struct LikelihoodModel {
    std::function<double(const Params&, const Sample&)> log_lik;
    std::function<Params(const Sample&)> fit_unrestricted;
    std::function<Params(const Sample&)> fit_null;
};

/// {ϑ : L_{D₁}(ϑ) ≥ α L_{D₁}(θ̂_{D₂})} and its p-value function.
struct SlrRegion {
    Params theta_hat_d2;
    double log_lik_at_hat = 0.0;
    double alpha = 0.0;
    std::function<double(const Params&)> log_lik_d1;

    double p_value(const Params& theta) const {
        return std::min(1.0, std::exp(log_lik_d1(theta) - log_lik_at_hat));
    }
    bool contains(const Params& theta) const {
        return log_lik_d1(theta) >= std::log(alpha) + log_lik_at_hat;
    }
};

inline SlrRegion slr_confidence(const LikelihoodModel& m, const SplitSpec& split, const Sample& x, double alpha) {
    if (x.size() < 2) throw ConfigError("slr_confidence: need at least two observations");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("slr_confidence: alpha must lie in (0,1]");
    split.validate(x.size());
    auto [d1, d2] = split.apply(x);
    SlrRegion r;
    r.alpha = alpha;
    r.theta_hat_d2 = m.fit_unrestricted(d2);
    r.log_lik_d1 = [m, d1 = std::move(d1)](const Params& th) { return m.log_lik(th, d1); };
    r.log_lik_at_hat = r.log_lik_d1(r.theta_hat_d2);
    if (!std::isfinite(r.log_lik_at_hat)) throw NumericError("slr_confidence: likelihood at the D2 estimate is not finite");
    return r;
}

struct SlrTestResult {
    bool reject = false;
    double p_value = 1.0;
    double log_ratio = 0.0;  // log{max_{Θ₀} L_{D₁} / L_{D₁}(θ̂_{D₂})}
};

/// Rejects when max_{Θ₀} L_{D₁} < α L_{D₁}(θ̂_{D₂}), strictly.
inline SlrTestResult slr_test(const LikelihoodModel& m, const SplitSpec& split, const Sample& x, double alpha) {
    if (x.size() < 2) throw ConfigError("slr_test: need at least two observations");
    split.validate(x.size());
    auto [d1, d2] = split.apply(x);
    const double null_ll = m.log_lik(m.fit_null(d1), d1);
    const double alt_ll = m.log_lik(m.fit_unrestricted(d2), d1);
    if (std::isnan(null_ll) || std::isnan(alt_ll)) throw NumericError("slr_test: likelihood is NaN");
    SlrTestResult r;
    r.log_ratio = null_ll - alt_ll;
    r.p_value = std::min(1.0, std::exp(r.log_ratio));
    r.reject = r.log_ratio < std::log(alpha);
    return r;
}

/// N(μ, 1) likelihood; the null fit is the unrestricted one.
inline LikelihoodModel normal_unit_variance_model() {
    LikelihoodModel m;
    m.log_lik = [](const Params& th, const Sample& x) {
        double s = 0.0;
        for (double v : x) s += (v - th[0]) * (v - th[0]);
        return -0.5 * s - 0.5 * static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi);
    };
    m.fit_unrestricted = [](const Sample& x) {
        double s = 0.0;
        for (double v : x) s += v;
        return Params{s / static_cast<double>(x.size())};
    };
    m.fit_null = m.fit_unrestricted;
    return m;
}

// ---------------------------------------------------------------------------
// Normal mean with unit variance, through the half-sample means.

/// α(x,ϑ) = min{1, L_{D₁}(ϑ)/L_{D₁}(x̄₂)} = min{1, exp(−(m₁/2)[(x̄₁−ϑ)² − (x̄₁−x̄₂)²])}.
inline double slr_normal_index(double xbar1, double xbar2, std::size_t m1, double theta) {
    const double a = xbar1 - theta, b = xbar1 - xbar2;
    return std::min(1.0, std::exp(-0.5 * static_cast<double>(m1) * (a * a - b * b)));
}

/// Focal levels ℓ(u) = min{1, exp((m₁/2)(ū₂² − 2ū₁ū₂))}, free of ϑ.
inline RandomSetLaw slr_normal_random_set(std::size_t m1, std::size_t m2) {
    const Association a = builtin_association(
        AssociationKind::split_normal, {.n1 = static_cast<int>(m1), .n2 = static_cast<int>(m2)});
    RandomSetLaw law;
    law.sample_u = a.sample_u;
    law.focal.level = [m1](const ParameterPoint&, const Sample& u) {
        return std::min(1.0, std::exp(0.5 * static_cast<double>(m1) * (u[1] * u[1] - 2.0 * u[0] * u[1])));
    };
    law.focal.contains = [lvl = law.focal.level](double alpha, const ParameterPoint& th, const Sample& u) {
        return lvl(th, u) >= alpha;
    };
    law.focal.invariance_key = [](const ParameterPoint&) { return std::vector<double>{}; };
    return law;
}

/// P{−Ū₂² + 2Ū₁Ū₂ > 0} = 1/2 − arcsin(ρ⁻)/π in closed form, the mass outside S₁.
inline double slr_normal_outside_s1(std::size_t m1, std::size_t m2) {
    const double v1 = 1.0 / static_cast<double>(m1), v2 = 1.0 / static_cast<double>(m2);
    // a = Ū₂, b = 2Ū₁ − Ū₂: cov(a,b) = −v₂, var(b) = 4v₁ + v₂.
    const double rho = -v2 / std::sqrt(v2 * (4.0 * v1 + v2));
    return 0.5 + std::asin(rho) / std::numbers::pi;
}

struct SlrNormalIm {
    std::size_t m1 = 0, m2 = 0;
    double xbar1 = 0.0, xbar2 = 0.0, xbar = 0.0;
    std::shared_ptr<const PlausibilityEngine> engine;

    double index(double theta) const { return slr_normal_index(xbar1, xbar2, m1, theta); }

    PointPlausibility plausibility(double theta) const {
        IndexEvaluator idx = [this](const Sample&, const ParameterPoint& th) -> IndexResult {
            return {index(th[0]), true};
        };
        return point_plausibility(*engine, idx, {xbar1, xbar2}, ParameterPoint{theta});
    }

    Domain domain() const {
        const double w = 6.0 * (std::abs(xbar1 - xbar2) + 1.0 / std::sqrt(static_cast<double>(m1)));
        return Domain::interval(xbar1 - w, xbar1 + w);
    }

    Contour im_contour() const {
        Contour c;
        c.domain = domain();
        c.label = "SLR-normal IM";
        c.mc_meta = McMeta{engine->n_rep(), engine->mc().seed, "shared draws of the half-sample means"};
        c.eval = [self = *this](const ParameterPoint& th) { return self.plausibility(th[0]).value; };
        return c;
    }

    /// p-value function of the split LR confidence family.
    Contour slr_contour() const {
        Contour c;
        c.domain = domain();
        c.label = "split LR";
        c.eval = [self = *this](const ParameterPoint& th) { return self.index(th[0]); };
        return c;
    }

    /// 1 − P_U(S₁) on the shared draws.
    McEstimate outside_s1() const {
        const McEstimate cov = engine->coverage(ParameterPoint{0.0}, 1.0);
        return {1.0 - cov.value, cov.std_error, cov.n};
    }
};

inline SlrNormalIm slr_normal_im(const Sample& x, const SplitSpec& split, const McConfig& mc) {
    if (x.size() < 2) throw ConfigError("slr_normal_im: need at least two observations");
    split.validate(x.size());
    auto [d1, d2] = split.apply(x);
    SlrNormalIm im;
    im.m1 = d1.size();
    im.m2 = d2.size();
    auto mean = [](const Sample& v) {
        double s = 0.0;
        for (double t : v) s += t;
        return s / static_cast<double>(v.size());
    };
    im.xbar1 = mean(d1);
    im.xbar2 = mean(d2);
    im.xbar = mean(x);
    im.engine = std::make_shared<const PlausibilityEngine>(slr_normal_random_set(im.m1, im.m2), mc);
    return im;
}

inline Contour slr_normal_im_contour(const Sample& x, const SplitSpec& split, const McConfig& mc) {
    return slr_normal_im(x, split, mc).im_contour();
}

}  // namespace imkit
