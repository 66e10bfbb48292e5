#pragma once

// Distribution functions used throughout the library. Thin wrappers over
// Boost.Math with the boundary conventions the inference code relies on.

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "imkit/error.hpp"

namespace imkit::dist {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_pdf(double x) {
    constexpr double inv_sqrt_2pi = 0.39894228040143267794;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double normal_quantile(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

inline double student_t_cdf(double df, double t) {
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    return boost::math::cdf(boost::math::students_t_distribution<double>(df), t);
}

inline double student_t_quantile(double df, double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return boost::math::quantile(boost::math::students_t_distribution<double>(df), p);
}

inline double chisq_cdf(double df, double q) {
    if (q <= 0.0) return 0.0;
    if (std::isinf(q)) return 1.0;
    return boost::math::cdf(boost::math::chi_squared_distribution<double>(df), q);
}

inline double noncentral_chisq_cdf(double df, double ncp, double x) {
    if (x <= 0.0) return 0.0;
    if (ncp <= 0.0) return chisq_cdf(df, x);
    return boost::math::cdf(boost::math::non_central_chi_squared_distribution<double>(df, ncp), x);
}

inline double noncentral_chisq_quantile(double df, double ncp, double p) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    if (ncp <= 0.0)
        return boost::math::quantile(boost::math::chi_squared_distribution<double>(df), p);
    return boost::math::quantile(
        boost::math::non_central_chi_squared_distribution<double>(df, ncp), p);
}

/// Bin(n, p) distribution function at k; 0 for k < 0 and 1 for k >= n.
inline double binomial_cdf(int n, double p, int k) {
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    return boost::math::cdf(boost::math::binomial_distribution<double>(n, p), k);
}

inline double binomial_pmf(int n, double p, int k) {
    if (k < 0 || k > n) return 0.0;
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return k == n ? 1.0 : 0.0;
    return boost::math::pdf(boost::math::binomial_distribution<double>(n, p), k);
}

/// Smallest k with F_p(k) >= u, found by CDF search.
inline int binomial_quantile(int n, double p, double u) {
    if (u <= 0.0) return 0;
    int lo = 0, hi = n;
    while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (binomial_cdf(n, p, mid) >= u)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

/// log(sum(exp(v))) for a small fixed set of terms.
template <class Range>
double log_sum_exp(const Range& terms) {
    double m = -std::numeric_limits<double>::infinity();
    for (double t : terms) m = std::max(m, t);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return m + std::log(s);
}

}  // namespace imkit::dist
