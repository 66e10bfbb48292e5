#pragma once

// Input procedures for the IM construction: nested confidence families
// C_α(x) for a feature φ(θ), and nested test families T_α(x) for Θ₀.

#include <functional>
#include <string>
#include <utility>

#include "imkit/contour.hpp"
#include "imkit/error.hpp"
#include "imkit/point.hpp"

namespace imkit {

/// φ₀ ∈ C_α(x), nested: α ≤ α' implies C_α'(x) ⊆ C_α(x).
struct ConfidenceFamily {
    std::function<bool(double alpha, const Sample& x, const ParameterPoint& phi)> contains;
    std::function<ParameterPoint(const ParameterPoint&)> feature;  // empty means identity
    bool nested = true;
    std::string name;

    ParameterPoint phi(const ParameterPoint& theta) const { return feature ? feature(theta) : theta; }
};

/// T_α(x) = 1 rejects Θ₀; nested: α ≤ α' and T_α(x) = 1 imply T_α'(x) = 1.
struct TestFamily {
    std::function<bool(double alpha, const Sample& x)> reject;
    Assertion null_set = Assertion::whole();
    std::function<double(const Sample& x)> p_value;  // optional closed form
    std::string name;
};

struct ContourFromConfidenceOptions {
    double alpha_tol = 1e-8;
    int nested_probes = 8;  // membership spot checks on each side of the boundary
};

/// ϑ ↦ sup{α : C_α(x) ∋ ϑ} by bisection over α. Membership is probed on
/// both sides of the located boundary; a violation means C is not nested.
inline Contour contour_from_confidence(const ConfidenceFamily& family, const Sample& x, Domain domain,
                                       const ContourFromConfidenceOptions& opt = {}) {
    if (!family.contains) throw ConfigError("contour_from_confidence: family has no membership predicate");
    Contour out;
    out.domain = std::move(domain);
    out.label = family.name.empty() ? "confidence contour" : family.name;
    out.eval = [family, x, opt](const ParameterPoint& th) -> double {
        const ParameterPoint phi = family.feature ? family.feature(th) : th;
        auto in = [&](double a) { return family.contains(a, x, phi); };
        if (in(1.0)) return 1.0;
        if (!in(0.0)) return 0.0;
        double lo = 0.0, hi = 1.0;
        while (hi - lo > opt.alpha_tol) {
            const double mid = 0.5 * (lo + hi);
            if (in(mid))
                lo = mid;
            else
                hi = mid;
        }
        for (int k = 1; k <= opt.nested_probes; ++k) {
            const double frac = static_cast<double>(k) / static_cast<double>(opt.nested_probes + 1);
            if (!in(lo * frac)) throw StructuralError("confidence family is not nested in alpha");
            if (in(hi + (1.0 - hi) * frac)) throw StructuralError("confidence family is not nested in alpha");
        }
        return 0.5 * (lo + hi);
    };
    return out;
}

}  // namespace imkit
