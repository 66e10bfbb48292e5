#pragma once

// Binomial model: the Clopper–Pearson p-value function and its exact IM
// counterpart, which sums binomial point masses (no Monte Carlo).

#include <algorithm>
#include <cmath>
#include <vector>

#include "imkit/association.hpp"
#include "imkit/contour.hpp"
#include "imkit/error.hpp"
#include "imkit/procedures.hpp"
#include "imkit/random_set.hpp"
#include "imkit/special.hpp"

namespace imkit::models {

struct BinomialSetup {
    int n = 0;
    int x = 0;

    void validate() const {
        if (n < 1) throw ConfigError("binomial: n must be at least 1");
        if (x < 0 || x > n) throw ConfigError("binomial: x must lie in [0, n]");
    }
};

/// α(x,ϑ) = min{1, 2F_ϑ(x), 2(1 − F_ϑ(x−1))}.
inline double binomial_cp_index(int n, int x, double theta) {
    const double lower_tail = dist::binomial_cdf(n, theta, x);
    const double upper_tail = 1.0 - dist::binomial_cdf(n, theta, x - 1);
    return std::min({1.0, 2.0 * lower_tail, 2.0 * upper_tail});
}

/// C_α(x) = {ϑ : F_ϑ(x) ≥ α/2, 1 − F_ϑ(x−1) ≥ α/2}.
inline ConfidenceFamily binomial_cp_family(int n) {
    ConfidenceFamily c;
    c.name = "Clopper-Pearson";
    c.contains = [n](double alpha, const Sample& x, const ParameterPoint& th) {
        const int k = static_cast<int>(std::lround(x[0]));
        return binomial_cp_index(n, k, th[0]) >= alpha;
    };
    return c;
}

inline Contour binomial_cp_contour(const BinomialSetup& s) {
    s.validate();
    Contour c;
    c.domain = Domain::interval(0.0, 1.0);
    c.label = "Clopper-Pearson";
    c.eval = [s](const ParameterPoint& th) { return binomial_cp_index(s.n, s.x, th[0]); };
    return c;
}

/// Ties in the index are compared with this relative tolerance; symmetric
/// atoms at ϑ = 1/2 tie exactly in real arithmetic.
inline constexpr double kBinomialTieTol = 1e-9;

/// π(ϑ) = P_ϑ{α(K,ϑ) ≤ α(x,ϑ)}, K ~ Bin(n,ϑ): the P_U-probability of the
/// CDF-intervals of U mapped to atoms K with level at most α(x,ϑ).
inline double binomial_im_value(int n, int x, double theta) {
    if (theta <= 0.0) return x == 0 ? 1.0 : 0.0;
    if (theta >= 1.0) return x == n ? 1.0 : 0.0;
    const double ax = binomial_cp_index(n, x, theta);
    if (ax >= 1.0) return 1.0;
    std::vector<double> cdf(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) cdf[static_cast<std::size_t>(k)] = dist::binomial_cdf(n, theta, k);
    double total = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double lo_tail = cdf[static_cast<std::size_t>(k)];
        const double hi_tail = 1.0 - (k > 0 ? cdf[static_cast<std::size_t>(k) - 1] : 0.0);
        const double ak = std::min({1.0, 2.0 * lo_tail, 2.0 * hi_tail});
        if (ak <= ax * (1.0 + kBinomialTieTol)) total += dist::binomial_pmf(n, theta, k);
    }
    return std::min(total, 1.0);
}

inline Contour binomial_im_contour(const BinomialSetup& s) {
    s.validate();
    Contour c;
    c.domain = Domain::interval(0.0, 1.0);
    c.label = "binomial IM";
    c.eval = [s](const ParameterPoint& th) { return binomial_im_value(s.n, s.x, th[0]); };
    return c;
}

/// The same IM through the generic random-set machinery: focal levels
/// ℓ_ϑ(u) = α(F_ϑ⁻¹(u), ϑ). Useful to cross-check the exact sum by simulation.
inline RandomSetLaw binomial_random_set(int n) {
    const Association a = builtin_association(AssociationKind::binomial_quantile, {.n = n});
    RandomSetLaw law;
    law.sample_u = a.sample_u;
    law.focal.level = [n](const ParameterPoint& th, const Sample& u) {
        return binomial_cp_index(n, dist::binomial_quantile(n, th[0], u[0]), th[0]);
    };
    law.focal.contains = [lvl = law.focal.level](double alpha, const ParameterPoint& th, const Sample& u) {
        return lvl(th, u) >= alpha;
    };
    return law;
}

inline IndexEvaluator binomial_cp_index_evaluator(int n) {
    return [n](const Sample& x, const ParameterPoint& th) -> IndexResult {
        return {binomial_cp_index(n, static_cast<int>(std::lround(x[0])), th[0]), true};
    };
}

}  // namespace imkit::models
