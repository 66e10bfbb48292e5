#pragma once

// Blaker's acceptability function written from its definition with
// log-gamma point masses, independent of the library's binomial routines.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

inline std::vector<double> binomial_pmf_table(int n, double p) {
    std::vector<double> pmf(n + 1);
    for (int k = 0; k <= n; ++k) {
        if (p <= 0.0) {
            pmf[k] = k == 0;
        } else if (p >= 1.0) {
            pmf[k] = k == n;
        } else {
            pmf[k] = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                              k * std::log(p) + (n - k) * std::log1p(-p));
        }
    }
    return pmf;
}

/// P_p{γ(K) ≤ γ(x)} with γ(k) = min{P(X ≤ k), P(X ≥ k)}.
inline double blaker_acceptability(int n, int x, double p) {
    const auto pmf = binomial_pmf_table(n, p);
    std::vector<double> lower(n + 1), upper(n + 1);
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) lower[k] = (acc += pmf[k]);
    acc = 0.0;
    for (int k = n; k >= 0; --k) upper[k] = (acc += pmf[k]);
    auto gamma = [&](int k) { return std::min(lower[k], upper[k]); };
    const double gx = gamma(x);
    double total = 0.0;
    for (int k = 0; k <= n; ++k)
        if (gamma(k) <= gx * (1.0 + 1e-7)) total += pmf[k];
    return std::min(total, 1.0);
}

}  // namespace oracle
