#pragma once

// Normal location models: the scalar z-interval IM and the bivariate
// normal-means contours, including both Fieller–Creasy marginals.

#include <cmath>
#include <numbers>
#include <optional>

#include "imkit/association.hpp"
#include "imkit/contour.hpp"
#include "imkit/error.hpp"
#include "imkit/procedures.hpp"
#include "imkit/random_set.hpp"
#include "imkit/special.hpp"

namespace imkit::models {

// ---------------------------------------------------------------------------
// Scalar mean, X_i = θ + U_i.

/// C_α(x) = x̄ ± z*_α n^{-1/2}.
inline ConfidenceFamily z_interval_family(int n) {
    ConfidenceFamily c;
    c.name = "z-interval";
    c.contains = [n](double alpha, const Sample& x, const ParameterPoint& th) {
        double m = 0.0;
        for (double v : x) m += v;
        m /= static_cast<double>(x.size());
        const double z = dist::normal_quantile(1.0 - 0.5 * alpha);
        return std::abs(m - th[0]) <= z / std::sqrt(static_cast<double>(n));
    };
    return c;
}

inline double z_index(double xbar, int n, double theta) {
    return 2.0 * (1.0 - dist::normal_cdf(std::sqrt(static_cast<double>(n)) * std::abs(xbar - theta)));
}

/// Focal sets {u : |ū| ≤ z*_α n^{-1/2}}, free of ϑ.
inline RandomSetLaw z_interval_random_set(int n) {
    const Association a = builtin_association(AssociationKind::normal_location, {.n = n});
    RandomSetLaw law;
    law.sample_u = a.sample_u;
    law.focal.level = [n](const ParameterPoint&, const Sample& u) {
        double m = 0.0;
        for (double v : u) m += v;
        return z_index(m / static_cast<double>(u.size()), n, 0.0);
    };
    law.focal.contains = [lvl = law.focal.level](double alpha, const ParameterPoint& th, const Sample& u) {
        return lvl(th, u) >= alpha;
    };
    law.focal.invariance_key = [](const ParameterPoint&) { return std::vector<double>{}; };
    return law;
}

inline IndexEvaluator z_index_evaluator(int n) {
    return [n](const Sample& x, const ParameterPoint& th) -> IndexResult {
        double m = 0.0;
        for (double v : x) m += v;
        return {z_index(m / static_cast<double>(x.size()), n, th[0]), true};
    };
}

// ---------------------------------------------------------------------------
// Two independent observations X_k ~ N(θ_k, 1).

struct NormalMeans2DSetup {
    double x1 = 0.0;
    double x2 = 0.0;

    void validate() const {
        if (!std::isfinite(x1) || !std::isfinite(x2)) throw ConfigError("normal means: observations must be finite");
    }
};

/// 1 − G₂(q) for the chi-square(2) distribution function G₂.
inline double chisq2_survival(double q) { return std::exp(-0.5 * std::max(q, 0.0)); }

/// 1 − G₁(q).
inline double chisq1_survival(double q) { return std::erfc(std::sqrt(0.5 * std::max(q, 0.0))); }

/// (x₁ − φx₂)²/(1 + φ²), the squared distance from x to the line θ₁ = φθ₂.
inline double fc_quadratic(const NormalMeans2DSetup& s, double phi) {
    const double r = s.x1 - phi * s.x2;
    return r * r / (1.0 + phi * phi);
}

/// Closest point to x on the fiber {ϑ : ϑ₁/ϑ₂ = φ}.
inline ParameterPoint fc_fiber_maximizer(const NormalMeans2DSetup& s, double phi) {
    const double w = 1.0 / (1.0 + phi * phi);
    return ParameterPoint{w * (phi * phi * s.x1 + phi * s.x2), w * (phi * s.x1 + s.x2)};
}

struct NormalMeans2DContours {
    Contour joint;
    Contour marginal_theta1_naive;
    Contour marginal_theta1_strategic;
    Contour fc_naive;
    Contour fc_strategic;
};

inline NormalMeans2DContours nm2d_contours(const NormalMeans2DSetup& s, double phi_half_width = 10.0) {
    s.validate();
    NormalMeans2DContours out;
    const double w = 6.0;

    out.joint.label = "joint";
    out.joint.domain = Domain::box(Box({s.x1 - w, s.x2 - w}, {s.x1 + w, s.x2 + w}));
    out.joint.eval = [s](const ParameterPoint& th) {
        const double d1 = th[0] - s.x1, d2 = th[1] - s.x2;
        return chisq2_survival(d1 * d1 + d2 * d2);
    };

    out.marginal_theta1_naive.label = "theta1 naive";
    out.marginal_theta1_naive.domain = Domain::interval(s.x1 - w, s.x1 + w);
    out.marginal_theta1_naive.eval = [s](const ParameterPoint& phi) {
        const double d = phi[0] - s.x1;
        return chisq2_survival(d * d);
    };

    out.marginal_theta1_strategic.label = "theta1 strategic";
    out.marginal_theta1_strategic.domain = out.marginal_theta1_naive.domain;
    out.marginal_theta1_strategic.eval = [s](const ParameterPoint& phi) {
        return 1.0 - std::abs(2.0 * dist::normal_cdf(s.x1 - phi[0]) - 1.0);
    };

    const double centre = s.x2 != 0.0 ? s.x1 / s.x2 : 0.0;
    const Domain phi_dom = Domain::interval(centre - phi_half_width, centre + phi_half_width);

    out.fc_naive.label = "Fieller-Creasy naive";
    out.fc_naive.domain = phi_dom;
    out.fc_naive.eval = [s](const ParameterPoint& phi) { return chisq2_survival(fc_quadratic(s, phi[0])); };

    out.fc_strategic.label = "Fieller-Creasy strategic";
    out.fc_strategic.domain = phi_dom;
    out.fc_strategic.eval = [s](const ParameterPoint& phi) { return chisq1_survival(fc_quadratic(s, phi[0])); };
    return out;
}

/// Fiber of the ratio φ = θ₁/θ₂ for numeric marginalization of the joint
/// contour: ϑ = (φt, t), t ∈ [lo, hi].
inline FiberSearch fc_fiber(Domain phi_domain, double t_lo = -20.0, double t_hi = 20.0) {
    FiberSearch f;
    f.embed = [](const ParameterPoint& phi, const std::vector<double>& z) {
        return ParameterPoint{phi[0] * z[0], z[0]};
    };
    f.nuisance = Box::interval(t_lo, t_hi);
    f.phi_domain = std::move(phi_domain);
    f.sup.grid_points = 2048;
    f.sup.starts = 2;
    f.sup.sweeps = 2;
    f.sup.tol = 1e-12;
    return f;
}

/// Closed-form counterpart of fc_fiber.
inline FiberSearch fc_fiber_closed_form(const NormalMeans2DSetup& s, Domain phi_domain) {
    FiberSearch f;
    f.maximizer = [s](const ParameterPoint& phi) -> std::optional<ParameterPoint> {
        return fc_fiber_maximizer(s, phi[0]);
    };
    f.phi_domain = std::move(phi_domain);
    return f;
}

/// sup of the naive ratio contour over a half-line of φ, via the angle
/// parameterization φ = cot ω: on ω the contour is 1 − G₂((x₁ sin ω − x₂ cos ω)²),
/// so no unbounded search is needed. `above` selects (c, ∞) instead of (−∞, c].
inline double fc_naive_half_line_sup(const NormalMeans2DSetup& s, double c, bool above) {
    const double pi = std::numbers::pi;
    const double w0 = std::atan2(1.0, c);  // ω with cot ω = c, in (0, π)
    const double lo = above ? 0.0 : w0;
    const double hi = above ? w0 : pi;
    // (x₁ sin ω − x₂ cos ω)² = r² sin²(ω − β) with β = atan2(x₂, x₁).
    const double r2 = s.x1 * s.x1 + s.x2 * s.x2;
    double beta = std::atan2(s.x2, s.x1);
    if (beta < 0.0) beta += pi;
    double best_q;
    if (beta >= lo && beta <= hi) {
        best_q = 0.0;
    } else {
        auto q = [&](double w) {
            const double v = std::sin(w - beta);
            return r2 * v * v;
        };
        // ω − β stays strictly between consecutive zeros of sin, so the
        // minimum of sin² sits at an endpoint.
        best_q = std::min(q(lo), q(hi));
    }
    return chisq2_survival(best_q);
}

}  // namespace imkit::models
