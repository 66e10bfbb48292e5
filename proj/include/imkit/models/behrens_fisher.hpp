#pragma once

// Behrens–Fisher: the Hsu–Scheffé contour for φ = μ₁ − μ₂ and its IM
// counterpart, fused over ϑ and marginalized by a max over λ.

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "imkit/association.hpp"
#include "imkit/contour.hpp"
#include "imkit/error.hpp"
#include "imkit/procedures.hpp"
#include "imkit/random_set.hpp"
#include "imkit/special.hpp"

namespace imkit::models {

struct BehrensFisherSetup {
    int n1 = 0;
    double m1 = 0.0;
    double v1 = 0.0;
    int n2 = 0;
    double m2 = 0.0;
    double v2 = 0.0;
    std::vector<double> lambda_grid = default_lambda_grid();

    static std::vector<double> default_lambda_grid(std::size_t k = 41, double lo = 0.0, double hi = 1.0) {
        std::vector<double> g(k);
        for (std::size_t i = 0; i < k; ++i)
            g[i] = k > 1 ? lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k - 1) : lo;
        return g;
    }

    /// The travel-time summary statistics used as the running example.
    static BehrensFisherSetup travel_times() { return {5, 7.580, 2.237, 11, 6.136, 0.073}; }

    void validate() const {
        if (n1 < 2 || n2 < 2) throw ConfigError("behrens_fisher: sample sizes must be at least 2");
        if (!(v1 > 0.0) || !(v2 > 0.0)) throw ConfigError("behrens_fisher: sample variances must be positive");
        for (double l : lambda_grid)
            if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("behrens_fisher: lambda grid must lie in [0,1]");
    }

    double d() const { return m1 - m2; }
    double f() const { return detail::bf_scale(n1, n2, v1, v2); }
    int df() const { return std::min(n1, n2) - 1; }
    Sample x() const { return {d(), v1, v2}; }
};

/// 2{1 − F_ν(|t|)} for the Student-t distribution function F_ν.
inline double two_sided_t(double df, double t) { return 2.0 * (1.0 - dist::student_t_cdf(df, std::abs(t))); }

/// Weight of σ₁²/n₁ in the variance of D; S_α(ϑ) depends on ϑ only through it.
inline double bf_lambda(int n1, int n2, double s1, double s2) {
    const double a = s1 / n1, b = s2 / n2;
    return a / (a + b);
}

/// A representative ϑ = (φ, σ₁², σ₂²) with the given λ (σ₁²/n₁ + σ₂²/n₂ = 1).
inline ParameterPoint bf_theta_for(int n1, int n2, double phi, double lambda) {
    return ParameterPoint{phi, lambda * n1, (1.0 - lambda) * n2};
}

/// C_α(x) = d ± t*_α f(v₁, v₂) on x = (d, v₁, v₂), feature φ(ϑ) = ϑ₁.
inline ConfidenceFamily hs_family(int n1, int n2) {
    ConfidenceFamily c;
    c.name = "Hsu-Scheffe";
    const double df = std::min(n1, n2) - 1;
    c.contains = [n1, n2, df](double alpha, const Sample& x, const ParameterPoint& phi) {
        const double t = dist::student_t_quantile(df, 1.0 - 0.5 * alpha);
        return std::abs(x[0] - phi[0]) <= t * detail::bf_scale(n1, n2, x[1], x[2]);
    };
    c.feature = [](const ParameterPoint& th) { return ParameterPoint{th[0]}; };
    return c;
}

inline Domain bf_phi_domain(const BehrensFisherSetup& s, double half_widths = 12.0) {
    return Domain::interval(s.d() - half_widths * s.f(), s.d() + half_widths * s.f());
}

inline Contour bf_hs_contour(const BehrensFisherSetup& s) {
    s.validate();
    Contour c;
    c.domain = bf_phi_domain(s);
    c.label = "Hsu-Scheffe";
    c.eval = [s](const ParameterPoint& phi) { return two_sided_t(s.df(), (s.d() - phi[0]) / s.f()); };
    return c;
}

/// Focal levels ℓ_ϑ(u) = 2{1 − F_ν(|u₁| / (λ u₂₁ + (1−λ) u₂₂)^{1/2})}, keyed by λ_ϑ.
inline RandomSetLaw bf_random_set(int n1, int n2) {
    const Association a = builtin_association(AssociationKind::behrens_fisher, {.n1 = n1, .n2 = n2});
    const double df = std::min(n1, n2) - 1;
    RandomSetLaw law;
    law.sample_u = a.sample_u;
    law.focal.level = [n1, n2, df](const ParameterPoint& th, const Sample& u) {
        const double l = bf_lambda(n1, n2, th[1], th[2]);
        return two_sided_t(df, u[0] / std::sqrt(l * u[1] + (1.0 - l) * u[2]));
    };
    law.focal.contains = [lvl = law.focal.level](double alpha, const ParameterPoint& th, const Sample& u) {
        return lvl(th, u) >= alpha;
    };
    law.focal.invariance_key = [n1, n2](const ParameterPoint& th) {
        return std::vector<double>{bf_lambda(n1, n2, th[1], th[2])};
    };
    return law;
}

/// α(x,ϑ) = 2{1 − F_ν(|t(x,ϑ)|)}, t(x,ϑ) = (d − φ)/f(v₁,v₂).
inline IndexEvaluator bf_index_evaluator(int n1, int n2) {
    const double df = std::min(n1, n2) - 1;
    return [n1, n2, df](const Sample& x, const ParameterPoint& th) -> IndexResult {
        return {two_sided_t(df, (x[0] - th[0]) / detail::bf_scale(n1, n2, x[1], x[2])), true};
    };
}

struct BehrensFisherIm {
    std::shared_ptr<const PlausibilityEngine> engine;
    IndexEvaluator index;
    BehrensFisherSetup setup;

    /// π_x(ϑ | ϑ) at the representative ϑ with the given (φ, λ).
    McEstimate lambda_value(double phi, double lambda) const {
        const ParameterPoint th = bf_theta_for(setup.n1, setup.n2, phi, lambda);
        const IndexResult a = index(setup.x(), th);
        if (a.alpha >= 1.0) return McEstimate{1.0, 0.0, engine->n_rep()};
        return engine->plausibility(th, a.alpha);
    }

    Contour lambda_contour(double lambda) const {
        Contour c;
        c.domain = bf_phi_domain(setup);
        c.label = "lambda-specific IM";
        c.mc_meta = McMeta{engine->n_rep(), engine->mc().seed, "lambda " + std::to_string(lambda)};
        c.eval = [self = *this, lambda](const ParameterPoint& phi) { return self.lambda_value(phi[0], lambda).value; };
        return c;
    }

    /// max over the λ grid, with the maximizing λ's standard error.
    McEstimate marginal_value(double phi) const {
        McEstimate best{-1.0, 0.0, 0};
        for (double l : setup.lambda_grid) {
            const McEstimate e = lambda_value(phi, l);
            if (e.value > best.value) best = e;
        }
        return best;
    }

    Contour marginal() const {
        Contour c;
        c.domain = bf_phi_domain(setup);
        c.label = "IM marginal";
        c.mc_meta = McMeta{engine->n_rep(), engine->mc().seed, "max over lambda grid"};
        c.eval = [self = *this](const ParameterPoint& phi) { return self.marginal_value(phi[0]).value; };
        return c;
    }
};

inline BehrensFisherIm bf_im(const BehrensFisherSetup& s, const McConfig& mc) {
    s.validate();
    return {std::make_shared<const PlausibilityEngine>(bf_random_set(s.n1, s.n2), mc),
            bf_index_evaluator(s.n1, s.n2), s};
}

inline Contour bf_im_marginal(const BehrensFisherSetup& s, const McConfig& mc) { return bf_im(s, mc).marginal(); }

}  // namespace imkit::models
