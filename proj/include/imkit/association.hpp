#pragma once

// Associations X = a(θ, U), U ~ P_U, with the fiber predicates the IM
// construction needs: U_x(ϑ) membership and non-emptiness of Θ_x(u).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "imkit/error.hpp"
#include "imkit/point.hpp"
#include "imkit/rng.hpp"
#include "imkit/special.hpp"

namespace imkit {

enum class AssociationKind {
    normal_location,
    binomial_quantile,
    uniform_min_max,
    iid_quantile,
    behrens_fisher,
    noncentral_chisq,
    split_normal
};

inline const char* to_string(AssociationKind k) {
    switch (k) {
        case AssociationKind::normal_location: return "normal_location";
        case AssociationKind::binomial_quantile: return "binomial_quantile";
        case AssociationKind::uniform_min_max: return "uniform_min_max";
        case AssociationKind::iid_quantile: return "iid_quantile";
        case AssociationKind::behrens_fisher: return "behrens_fisher";
        case AssociationKind::noncentral_chisq: return "noncentral_chisq";
        case AssociationKind::split_normal: return "split_normal";
    }
    return "unknown";
}

inline AssociationKind association_kind_from_string(const std::string& s) {
    for (auto k : {AssociationKind::normal_location, AssociationKind::binomial_quantile,
                   AssociationKind::uniform_min_max, AssociationKind::iid_quantile,
                   AssociationKind::behrens_fisher, AssociationKind::noncentral_chisq,
                   AssociationKind::split_normal})
        if (s == to_string(k)) return k;
    throw ConfigError("unknown association kind: " + s);
}

/// Parameters of a builtin association. Unused fields are ignored per kind.
struct AssociationParams {
    int n = 1;         // sample size / trial count
    int n1 = 0;        // first sample size (behrens_fisher, split_normal)
    int n2 = 0;        // second sample size
    double df = 1.0;   // degrees of freedom (noncentral_chisq)
};

/// Statistic whose mean under P_{X|ϑ} is known in closed form.
struct ConsistencyProbe {
    std::string label;
    std::function<double(const Sample& x, const ParameterPoint& theta)> statistic;
    std::function<double(const ParameterPoint& theta)> expected;
};

struct Association {
    AssociationKind kind{};
    AssociationParams params;
    std::size_t dim_u = 0;
    std::function<Sample(RngStream&)> sample_u;
    std::function<Sample(const ParameterPoint& theta, const Sample& u)> forward;
    std::function<bool(const Sample& x, const ParameterPoint& theta, const Sample& u)> in_u_fiber;
    std::function<bool(const Sample& x, const Sample& u)> theta_fiber_nonempty;
    /// Some u ∈ U_x(ϑ), when the fiber is nonempty.
    std::function<std::optional<Sample>(const Sample& x, const ParameterPoint& theta)> representative_u;
    /// u values with nonempty Θ_x(u), used by the compatibility check.
    std::function<std::vector<Sample>(const Sample& x)> compatible_candidates;
    std::vector<ConsistencyProbe> probes;
};

namespace detail {

inline bool close(double a, double b, double tol = 1e-9) {
    return std::abs(a - b) <= tol * (1.0 + std::abs(a) + std::abs(b));
}

inline double mean_of(const Sample& v, std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s / static_cast<double>(hi - lo);
}

inline Association normal_location(int n) {
    Association a;
    a.kind = AssociationKind::normal_location;
    a.params.n = n;
    a.dim_u = static_cast<std::size_t>(n);
    a.sample_u = [n](RngStream& rng) {
        Sample u(static_cast<std::size_t>(n));
        for (auto& v : u) v = rng.normal();
        return u;
    };
    a.forward = [](const ParameterPoint& th, const Sample& u) {
        Sample x(u);
        for (auto& v : x) v += th[0];
        return x;
    };
    a.in_u_fiber = [](const Sample& x, const ParameterPoint& th, const Sample& u) {
        for (std::size_t i = 0; i < x.size(); ++i)
            if (!close(x[i], th[0] + u[i])) return false;
        return true;
    };
    a.theta_fiber_nonempty = [](const Sample& x, const Sample& u) {
        for (std::size_t i = 1; i < x.size(); ++i)
            if (!close(x[i] - u[i], x[0] - u[0])) return false;
        return true;
    };
    a.representative_u = [](const Sample& x, const ParameterPoint& th) -> std::optional<Sample> {
        Sample u(x);
        for (auto& v : u) v -= th[0];
        return u;
    };
    a.compatible_candidates = [](const Sample& x) {
        const double m = mean_of(x, 0, x.size());
        Sample u(x);
        for (auto& v : u) v -= m;
        return std::vector<Sample>{u};
    };
    a.probes = {
        {"mean(x)", [](const Sample& x, const ParameterPoint&) { return mean_of(x, 0, x.size()); },
         [](const ParameterPoint& th) { return th[0]; }},
        {"1{x1 <= theta}", [](const Sample& x, const ParameterPoint& th) { return x[0] <= th[0] ? 1.0 : 0.0; }, [](const ParameterPoint&) { return 0.5; }},
    };
    return a;
}

inline Association binomial_quantile(int n) {
    Association a;
    a.kind = AssociationKind::binomial_quantile;
    a.params.n = n;
    a.dim_u = 1;
    a.sample_u = [](RngStream& rng) { return Sample{rng.uniform()}; };
    a.forward = [n](const ParameterPoint& th, const Sample& u) {
        return Sample{static_cast<double>(dist::binomial_quantile(n, th[0], u[0]))};
    };
    a.in_u_fiber = [n](const Sample& x, const ParameterPoint& th, const Sample& u) {
        const int k = static_cast<int>(std::lround(x[0]));
        return dist::binomial_cdf(n, th[0], k - 1) < u[0] && u[0] <= dist::binomial_cdf(n, th[0], k);
    };
    // For 0 ≤ x ≤ n and u ∈ (0,1) some ϑ ∈ [0,1] satisfies F_ϑ(x−1) < u ≤ F_ϑ(x).
    a.theta_fiber_nonempty = [n](const Sample& x, const Sample& u) {
        return x[0] >= 0.0 && x[0] <= n && u[0] > 0.0 && u[0] < 1.0;
    };
    a.representative_u = [n](const Sample& x, const ParameterPoint& th) -> std::optional<Sample> {
        const int k = static_cast<int>(std::lround(x[0]));
        const double lo = dist::binomial_cdf(n, th[0], k - 1);
        const double hi = dist::binomial_cdf(n, th[0], k);
        if (!(hi > lo)) return std::nullopt;
        return Sample{hi};
    };
    a.compatible_candidates = [](const Sample&) { return std::vector<Sample>{{0.5}}; };
    a.probes = {
        {"x/n", [n](const Sample& x, const ParameterPoint&) { return x[0] / n; }, [](const ParameterPoint& th) { return th[0]; }},
        {"1{x <= n/2}", [n](const Sample& x, const ParameterPoint&) { return x[0] <= n / 2 ? 1.0 : 0.0; },
         [n](const ParameterPoint& th) { return dist::binomial_cdf(n, th[0], n / 2); }},
    };
    return a;
}

inline Association uniform_min_max(int n) {
    Association a;
    a.kind = AssociationKind::uniform_min_max;
    a.params.n = n;
    a.dim_u = 2;
    a.sample_u = [n](RngStream& rng) {
        double lo = 1.0, hi = 0.0;
        for (int i = 0; i < n; ++i) {
            const double v = rng.uniform();
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return Sample{lo, hi};
    };
    a.forward = [](const ParameterPoint& th, const Sample& u) { return Sample{th[0] + u[0], th[0] + u[1]}; };
    a.in_u_fiber = [](const Sample& x, const ParameterPoint& th, const Sample& u) {
        return close(x[0], th[0] + u[0]) && close(x[1], th[0] + u[1]);
    };
    a.theta_fiber_nonempty = [](const Sample& x, const Sample& u) { return close(x[1] - x[0], u[1] - u[0]); };
    a.representative_u = [](const Sample& x, const ParameterPoint& th) -> std::optional<Sample> {
        return Sample{x[0] - th[0], x[1] - th[0]};
    };
    a.compatible_candidates = [](const Sample& x) {
        const double centre = 0.5 * (x[0] + x[1] - 1.0);
        return std::vector<Sample>{{x[0] - centre, x[1] - centre}};
    };
    a.probes = {
        {"x1", [](const Sample& x, const ParameterPoint&) { return x[0]; },
         [n](const ParameterPoint& th) { return th[0] + 1.0 / (n + 1.0); }},
        {"x2", [](const Sample& x, const ParameterPoint&) { return x[1]; },
         [n](const ParameterPoint& th) { return th[0] + n / (n + 1.0); }},
    };
    return a;
}

/// X_i = F⁻¹(U_i); ϑ carries a DistributionHandle.
inline Association iid_quantile(int n) {
    Association a;
    a.kind = AssociationKind::iid_quantile;
    a.params.n = n;
    a.dim_u = static_cast<std::size_t>(n);
    a.sample_u = [n](RngStream& rng) {
        Sample u(static_cast<std::size_t>(n));
        for (auto& v : u) v = rng.uniform();
        return u;
    };
    a.forward = [](const ParameterPoint& th, const Sample& u) {
        if (!th.has_distribution()) throw DomainError("iid_quantile: parameter must carry a distribution");
        Sample x(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) x[i] = th.distribution().quantile(u[i]);
        return x;
    };
    a.in_u_fiber = [](const Sample& x, const ParameterPoint& th, const Sample& u) {
        const auto& F = th.distribution();
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double tol = 1e-12;
            if (!(F.left_limit(x[i]) - tol <= u[i] && u[i] <= F.cdf(x[i]) + tol)) return false;
        }
        return true;
    };
    // Any u with the ranks of x is reproduced by some continuous F.
    a.theta_fiber_nonempty = [](const Sample& x, const Sample& u) {
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = 0; j < x.size(); ++j)
                if (x[i] < x[j] && !(u[i] <= u[j])) return false;
        return true;
    };
    a.representative_u = [](const Sample& x, const ParameterPoint& th) -> std::optional<Sample> {
        Sample u(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) u[i] = th.distribution().cdf(x[i]);
        return u;
    };
    a.compatible_candidates = [](const Sample& x) {
        std::vector<std::size_t> idx(x.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](auto i, auto j) { return x[i] < x[j]; });
        Sample u(x.size());
        for (std::size_t r = 0; r < idx.size(); ++r)
            u[idx[r]] = (static_cast<double>(r) + 0.5) / static_cast<double>(x.size());
        return std::vector<Sample>{u};
    };
    a.probes = {
        {"1{F(x1) <= 1/2}", [](const Sample& x, const ParameterPoint& th) { return th.distribution().cdf(x[0]) <= 0.5 ? 1.0 : 0.0; }, [](const ParameterPoint&) { return 0.5; }},
    };
    return a;
}

inline double bf_scale(int n1, int n2, double s1, double s2) { return std::sqrt(s1 / n1 + s2 / n2); }

/// ϑ = (φ, σ₁², σ₂²), x = (d, v₁, v₂), u = (u₁, u₂₁, u₂₂).
inline Association behrens_fisher(int n1, int n2) {
    Association a;
    a.kind = AssociationKind::behrens_fisher;
    a.params.n1 = n1;
    a.params.n2 = n2;
    a.dim_u = 3;
    a.sample_u = [n1, n2](RngStream& rng) {
        const double z = rng.normal();
        return Sample{z, rng.chi_squared(n1 - 1) / (n1 - 1), rng.chi_squared(n2 - 1) / (n2 - 1)};
    };
    a.forward = [n1, n2](const ParameterPoint& th, const Sample& u) {
        return Sample{th[0] + bf_scale(n1, n2, th[1], th[2]) * u[0], th[1] * u[1], th[2] * u[2]};
    };
    a.in_u_fiber = [n1, n2](const Sample& x, const ParameterPoint& th, const Sample& u) {
        return close(x[0], th[0] + bf_scale(n1, n2, th[1], th[2]) * u[0]) && close(x[1], th[1] * u[1]) &&
               close(x[2], th[2] * u[2]);
    };
    a.theta_fiber_nonempty = [](const Sample& x, const Sample& u) {
        return u[1] > 0.0 && u[2] > 0.0 && x[1] > 0.0 && x[2] > 0.0;
    };
    a.representative_u = [n1, n2](const Sample& x, const ParameterPoint& th) -> std::optional<Sample> {
        return Sample{(x[0] - th[0]) / bf_scale(n1, n2, th[1], th[2]), x[1] / th[1], x[2] / th[2]};
    };
    a.compatible_candidates = [](const Sample&) { return std::vector<Sample>{{0.0, 1.0, 1.0}}; };
    a.probes = {
        {"(d - phi)/f(sigma)", [n1, n2](const Sample& x, const ParameterPoint& th) { return (x[0] - th[0]) / bf_scale(n1, n2, th[1], th[2]); }, [](const ParameterPoint&) { return 0.0; }},
        {"v1/sigma1^2", [](const Sample& x, const ParameterPoint& th) { return x[1] / th[1]; }, [](const ParameterPoint&) { return 1.0; }},
        {"v2/sigma2^2", [](const Sample& x, const ParameterPoint& th) { return x[2] / th[2]; }, [](const ParameterPoint&) { return 1.0; }},
    };
    return a;
}

inline Association noncentral_chisq(double df) {
    Association a;
    a.kind = AssociationKind::noncentral_chisq;
    a.params.df = df;
    a.dim_u = 1;
    a.sample_u = [](RngStream& rng) { return Sample{rng.uniform()}; };
    a.forward = [df](const ParameterPoint& th, const Sample& u) {
        return Sample{dist::noncentral_chisq_quantile(df, th[0], u[0])};
    };
    a.in_u_fiber = [df](const Sample& x, const ParameterPoint& th, const Sample& u) {
        return close(dist::noncentral_chisq_cdf(df, th[0], x[0]), u[0], 1e-7);
    };
    // ϑ ↦ F_ϑ(x) decreases from F₀(x) to 0, so {ϑ ≥ 0 : F_ϑ(x) = u} is empty iff u > F₀(x).
    a.theta_fiber_nonempty = [df](const Sample& x, const Sample& u) {
        return u[0] > 0.0 && u[0] <= dist::chisq_cdf(df, x[0]);
    };
    a.representative_u = [df](const Sample& x, const ParameterPoint& th) -> std::optional<Sample> {
        return Sample{dist::noncentral_chisq_cdf(df, th[0], x[0])};
    };
    a.compatible_candidates = [df](const Sample& x) {
        return std::vector<Sample>{{0.5 * dist::chisq_cdf(df, x[0])}};
    };
    a.probes = {
        {"x", [](const Sample& x, const ParameterPoint&) { return x[0]; }, [df](const ParameterPoint& th) { return df + th[0]; }},
    };
    return a;
}

/// Split-sample normal mean through the half-sample means: x = (x̄₁, x̄₂),
/// u = (ū₁, ū₂) with ū_k ~ N(0, 1/m_k).
inline Association split_normal(int n1, int n2) {
    Association a;
    a.kind = AssociationKind::split_normal;
    a.params.n1 = n1;
    a.params.n2 = n2;
    a.params.n = n1 + n2;
    a.dim_u = 2;
    const double s1 = 1.0 / std::sqrt(static_cast<double>(n1));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(n2));
    a.sample_u = [s1, s2](RngStream& rng) {
        const double z1 = rng.normal();
        return Sample{z1 * s1, rng.normal() * s2};
    };
    a.forward = [](const ParameterPoint& th, const Sample& u) { return Sample{th[0] + u[0], th[0] + u[1]}; };
    a.in_u_fiber = [](const Sample& x, const ParameterPoint& th, const Sample& u) {
        return close(x[0], th[0] + u[0]) && close(x[1], th[0] + u[1]);
    };
    a.theta_fiber_nonempty = [](const Sample& x, const Sample& u) { return close(x[0] - u[0], x[1] - u[1]); };
    a.representative_u = [](const Sample& x, const ParameterPoint& th) -> std::optional<Sample> {
        return Sample{x[0] - th[0], x[1] - th[0]};
    };
    a.compatible_candidates = [n1, n2](const Sample& x) {
        const double m = (n1 * x[0] + n2 * x[1]) / (n1 + n2);
        return std::vector<Sample>{{x[0] - m, x[1] - m}};
    };
    a.probes = {
        {"xbar1", [](const Sample& x, const ParameterPoint&) { return x[0]; }, [](const ParameterPoint& th) { return th[0]; }},
        {"xbar2", [](const Sample& x, const ParameterPoint&) { return x[1]; }, [](const ParameterPoint& th) { return th[0]; }},
    };
    return a;
}

}  // namespace detail

/// Fully wired builtin association; invalid parameters raise ConfigError.
inline Association builtin_association(AssociationKind kind, const AssociationParams& p) {
    auto need = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(std::string("builtin_association: ") + what);
    };
    switch (kind) {
        case AssociationKind::normal_location:
            need(p.n >= 1, "n must be at least 1");
            return detail::normal_location(p.n);
        case AssociationKind::binomial_quantile:
            need(p.n >= 1, "n must be at least 1");
            return detail::binomial_quantile(p.n);
        case AssociationKind::uniform_min_max:
            need(p.n >= 1, "n must be at least 1");
            return detail::uniform_min_max(p.n);
        case AssociationKind::iid_quantile:
            need(p.n >= 1, "n must be at least 1");
            return detail::iid_quantile(p.n);
        case AssociationKind::behrens_fisher:
            need(p.n1 >= 2 && p.n2 >= 2, "sample sizes must be at least 2");
            return detail::behrens_fisher(p.n1, p.n2);
        case AssociationKind::noncentral_chisq:
            need(p.df >= 1.0, "degrees of freedom must be at least 1");
            return detail::noncentral_chisq(p.df);
        case AssociationKind::split_normal:
            need(p.n1 >= 1 && p.n2 >= 1, "split sizes must be at least 1");
            return detail::split_normal(p.n1, p.n2);
    }
    throw ConfigError("builtin_association: unknown kind");
}

struct ConsistencyRow {
    std::string label;
    double mean = 0.0;
    double expected = 0.0;
    double z = 0.0;
    bool flagged = false;
};

struct ConsistencyReport {
    std::vector<ConsistencyRow> rows;
    std::size_t n_rep = 0;
    bool ok = true;
};

/// Simulates forward(ϑ, U) and compares probe means with their exact values;
/// rows with |z| > 4 are flagged. Report-only, never throws on a mismatch.
inline ConsistencyReport check_model_consistency(const Association& a, const ParameterPoint& theta,
                                                 std::size_t n_rep, std::uint64_t seed) {
    ConsistencyReport rep;
    rep.n_rep = n_rep;
    std::vector<double> sum(a.probes.size(), 0.0), sum2(a.probes.size(), 0.0);
    for (std::size_t r = 0; r < n_rep; ++r) {
        RngStream rng(seed, r);
        const Sample x = a.forward(theta, a.sample_u(rng));
        for (std::size_t k = 0; k < a.probes.size(); ++k) {
            const double v = a.probes[k].statistic(x, theta);
            sum[k] += v;
            sum2[k] += v * v;
        }
    }
    const double n = static_cast<double>(n_rep);
    for (std::size_t k = 0; k < a.probes.size(); ++k) {
        ConsistencyRow row;
        row.label = a.probes[k].label;
        row.mean = sum[k] / n;
        row.expected = a.probes[k].expected(theta);
        const double var = std::max(sum2[k] / n - row.mean * row.mean, 0.0);
        const double se = std::sqrt(var / n);
        row.z = se > 0.0 ? (row.mean - row.expected) / se : (row.mean == row.expected ? 0.0 : std::numeric_limits<double>::infinity());
        row.flagged = std::abs(row.z) > 4.0;
        rep.ok = rep.ok && !row.flagged;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace imkit
