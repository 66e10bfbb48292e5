#pragma once

// Turning a confidence family or test family into a valid IM: focal sets
// from the procedure, the index α(x,ϑ), fusion, and the IM test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "imkit/association.hpp"
#include "imkit/contour.hpp"
#include "imkit/error.hpp"
#include "imkit/optimize.hpp"
#include "imkit/procedures.hpp"
#include "imkit/random_set.hpp"

namespace imkit {

/// S_α(ϑ) = {u : C_α(a(ϑ,u)) ∋ φ(ϑ)}; closure comes from the family's
/// non-strict boundary inequalities.
inline FocalFamily focal_from_confidence(ConfidenceFamily c, Association a) {
    FocalFamily f;
    f.contains = [c = std::move(c), a = std::move(a)](double alpha, const ParameterPoint& th, const Sample& u) {
        return c.contains(alpha, a.forward(th, u), c.phi(th));
    };
    return f;
}

/// S_α(ϑ) = {u : T_α(a(ϑ,u)) = 0}, defined for ϑ ∈ Θ₀ only.
inline FocalFamily focal_from_test(TestFamily t, Association a) {
    FocalFamily f;
    auto null_set = t.null_set.contains;
    f.in_domain = null_set;
    f.contains = [t = std::move(t), a = std::move(a)](double alpha, const ParameterPoint& th, const Sample& u) {
        if (!t.null_set.contains(th)) throw DomainError("focal_from_test: parameter outside the null set");
        return !t.reject(alpha, a.forward(th, u));
    };
    return f;
}

/// Generic α(x,ϑ): the level of a representative of U_x(ϑ). Used when the
/// fiber is a single point (or the family is constant along it); models with
/// closed forms supply their own evaluator.
inline IndexEvaluator index_alpha(FocalFamily f, Association a) {
    return [f = std::move(f), a = std::move(a)](const Sample& x, const ParameterPoint& th) -> IndexResult {
        const auto u = a.representative_u(x, th);
        if (!u) return {0.0, false};
        return {f.level_of(th, *u), true};
    };
}

struct ImBuild {
    Contour contour;
    std::shared_ptr<const PlausibilityEngine> engine;
    IndexEvaluator index;
};

/// Fused IM contour from a confidence family. `index` and `level` override
/// the generic bisection paths when closed forms are known.
inline ImBuild im_from_confidence(const ConfidenceFamily& c, const Association& a, const Sample& x, Domain domain,
                                  const McConfig& mc, IndexEvaluator index = {},
                                  std::function<double(const ParameterPoint&, const Sample&)> level = {},
                                  std::function<std::vector<double>(const ParameterPoint&)> key = {}) {
    FocalFamily f = focal_from_confidence(c, a);
    if (level) f.level = std::move(level);
    if (key) f.invariance_key = std::move(key);
    if (!index) index = index_alpha(f, a);
    auto engine = std::make_shared<const PlausibilityEngine>(RandomSetLaw{f, a.sample_u}, mc);
    ImBuild b;
    b.engine = engine;
    b.index = index;
    b.contour = fused_contour(engine, index, x, std::move(domain), c.name.empty() ? "IM contour" : c.name + " IM");
    return b;
}

/// Parameterization of Θ₀ for sup-searches: ϑ = embed(z), z ∈ box.
struct NullSearch {
    Box box;
    std::function<ParameterPoint(const std::vector<double>& z)> embed;
    std::size_t grid_points = 64;
    std::size_t starts = 8;
    int sweeps = 2;
    double tol = 1e-6;
    /// Plug-in shortcut: evaluate only at this point (flagged in the result).
    std::optional<ParameterPoint> plugin;
};

struct ImTestResult {
    bool reject = false;
    double plausibility = 0.0;
    ParameterPoint argmax;
    bool plugin = false;
    bool search_ok = true;
    std::string note;
};

/// Multistart maximization of ϑ ↦ π(ϑ) over Θ₀.
inline ImTestResult sup_over_null(const std::function<double(const ParameterPoint&)>& pi, const NullSearch& s) {
    ImTestResult r;
    if (s.plugin) {
        r.plugin = true;
        r.argmax = *s.plugin;
        r.plausibility = pi(*s.plugin);
        r.note = "plug-in approximation";
        return r;
    }
    if (!s.embed) {
        r.search_ok = false;
        r.note = "no null parameterization supplied";
        return r;
    }
    if (s.box.dim() == 0) {
        r.argmax = s.embed({});
        r.plausibility = pi(r.argmax);
        return r;
    }
    auto f = [&](const std::vector<double>& z) {
        try {
            return pi(s.embed(z));
        } catch (const DomainError&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
    const auto m = maximize_on_box(f, s.box, s.grid_points, s.starts, s.sweeps, s.tol);
    if (m.argmax.empty()) {
        r.search_ok = false;
        r.note = "null search found no feasible point";
        return r;
    }
    r.argmax = s.embed(m.argmax);
    r.plausibility = std::clamp(m.value, 0.0, 1.0);
    return r;
}

/// T*_α(x) = 1{Π̃_x(Θ₀) ≤ α}, with Π̃_x(Θ₀) the sup of the fused contour over Θ₀.
inline ImTestResult im_test(const PlausibilityEngine& engine, const IndexEvaluator& index, const NullSearch& search,
                            const Sample& x, double alpha) {
    auto pi = [&](const ParameterPoint& th) { return point_plausibility(engine, index, x, th).value; };
    ImTestResult r = sup_over_null(pi, search);
    r.reject = r.plausibility <= alpha;
    return r;
}

inline ImTestResult im_test(const TestFamily& t, const Association& a, const NullSearch& search, const Sample& x,
                            double alpha, const McConfig& mc, IndexEvaluator index = {}) {
    FocalFamily f = focal_from_test(t, a);
    if (!index) index = index_alpha(f, a);
    PlausibilityEngine engine(RandomSetLaw{f, a.sample_u}, mc);
    return im_test(engine, index, search, x, alpha);
}

struct CompatibilityRow {
    std::size_t x_index = 0;
    std::size_t theta_index = 0;
    double alpha = 0.0;
    bool pass = false;
};

struct CompatibilityReport {
    std::vector<CompatibilityRow> rows;
    bool all_pass = true;
};

/// For each (x, ϑ, α) looks for some u ∈ S_α(ϑ) with Θ_x(u) ≠ ∅, among the
/// association's candidate points and `mc.n_rep` draws from P_U.
inline CompatibilityReport compatibility_check(const FocalFamily& f, const Association& a,
                                               const std::vector<Sample>& x_probe,
                                               const std::vector<ParameterPoint>& theta_probe,
                                               const std::vector<double>& alpha_grid, const McConfig& mc) {
    mc.validate();
    RngStream rng = mc.stream();
    std::vector<Sample> draws;
    draws.reserve(mc.n_rep);
    for (std::size_t i = 0; i < mc.n_rep; ++i) draws.push_back(a.sample_u(rng));

    CompatibilityReport rep;
    for (std::size_t xi = 0; xi < x_probe.size(); ++xi) {
        const Sample& x = x_probe[xi];
        std::vector<Sample> pool = a.compatible_candidates ? a.compatible_candidates(x) : std::vector<Sample>{};
        std::vector<Sample> usable;
        for (auto& u : pool)
            if (a.theta_fiber_nonempty(x, u)) usable.push_back(u);
        for (const auto& u : draws)
            if (a.theta_fiber_nonempty(x, u)) usable.push_back(u);
        for (std::size_t ti = 0; ti < theta_probe.size(); ++ti) {
            for (double alpha : alpha_grid) {
                CompatibilityRow row{xi, ti, alpha, false};
                for (const auto& u : usable)
                    if (f.contains(alpha, theta_probe[ti], u)) {
                        row.pass = true;
                        break;
                    }
                rep.all_pass = rep.all_pass && row.pass;
                rep.rows.push_back(row);
            }
        }
    }
    return rep;
}

}  // namespace imkit
