#pragma once

// One normal against a two-component normal mixture: EM fits, the split LR
// test and its IM counterpart on the location-scale association X = m + sU.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "imkit/error.hpp"
#include "imkit/point.hpp"
#include "imkit/random_set.hpp"
#include "imkit/rng.hpp"
#include "imkit/special.hpp"
#include "imkit/universal/slr.hpp"
#include "imkit/universal/split.hpp"

namespace imkit {

enum class MixtureVariance { common, separate, fixed_unit };

inline const char* to_string(MixtureVariance v) {
    switch (v) {
        case MixtureVariance::common: return "common";
        case MixtureVariance::separate: return "separate";
        case MixtureVariance::fixed_unit: return "fixed_unit";
    }
    return "unknown";
}

inline MixtureVariance mixture_variance_from_string(const std::string& s) {
    for (auto v : {MixtureVariance::common, MixtureVariance::separate, MixtureVariance::fixed_unit})
        if (s == to_string(v)) return v;
    throw ConfigError("unknown mixture variance mode: " + s);
}

struct MixtureOptions {
    MixtureVariance variance = MixtureVariance::common;
    int restarts = 10;
    double tol = 1e-8;
    int max_iter = 500;
    std::uint64_t seed = 0x6d1c;

    void validate() const {
        if (restarts < 1) throw ConfigError("mixture: restarts must be at least 1");
        if (max_iter < 1) throw ConfigError("mixture: max_iter must be at least 1");
        if (!(tol > 0.0)) throw ConfigError("mixture: tol must be positive");
    }
};

struct NormalFit {
    double mean = 0.0;
    double sd = 1.0;
};

inline double normal_log_lik(double mean, double sd, const Sample& x) {
    double s = 0.0;
    for (double v : x) s += (v - mean) * (v - mean);
    const double n = static_cast<double>(x.size());
    return -0.5 * s / (sd * sd) - n * std::log(sd) - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

/// Maximum likelihood N(m, s²) fit.
inline NormalFit fit_normal(const Sample& x) {
    if (x.empty()) throw ConfigError("fit_normal: empty sample");
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / static_cast<double>(x.size()));
    if (!(sd > 1e-12 * (1.0 + std::abs(m)))) throw NumericError("fit_normal: zero variance");
    return {m, sd};
}

struct EmRestart {
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    bool degenerate = false;
};

struct MixtureFit {
    double w = 0.5;  // weight of component 1
    double mu1 = 0.0, mu2 = 0.0;
    double sd1 = 1.0, sd2 = 1.0;
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<EmRestart> trace;
};

inline double mixture_log_lik(const MixtureFit& f, const Sample& x) {
    const double lw1 = std::log(f.w), lw2 = std::log1p(-f.w);
    const double c = -0.5 * std::log(2.0 * std::numbers::pi);
    double s = 0.0;
    for (double v : x) {
        const double z1 = (v - f.mu1) / f.sd1, z2 = (v - f.mu2) / f.sd2;
        const double a = lw1 - std::log(f.sd1) - 0.5 * z1 * z1;
        const double b = lw2 - std::log(f.sd2) - 0.5 * z2 * z2;
        s += std::max(a, b) + std::log1p(std::exp(-std::abs(a - b))) + c;
    }
    return s;
}

namespace detail {

inline double sorted_quantile(const std::vector<double>& s, double p) {
    const double h = p * static_cast<double>(s.size() - 1);
    const auto i = static_cast<std::size_t>(h);
    if (i + 1 >= s.size()) return s.back();
    return s[i] + (h - static_cast<double>(i)) * (s[i + 1] - s[i]);
}

/// One EM run from (w, μ₁, μ₂, σ₁, σ₂); returns false when a component collapses.
inline bool run_em(const Sample& x, MixtureFit& f, const MixtureOptions& o, double sd_floor) {
    const std::size_t n = x.size();
    std::vector<double> r(n);
    double prev = -std::numeric_limits<double>::infinity();
    for (int it = 1; it <= o.max_iter; ++it) {
        // E-step, with the log-likelihood at the current parameters.
        const double lw1 = std::log(f.w), lw2 = std::log1p(-f.w);
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z1 = (x[i] - f.mu1) / f.sd1, z2 = (x[i] - f.mu2) / f.sd2;
            const double a = lw1 - std::log(f.sd1) - 0.5 * z1 * z1;
            const double b = lw2 - std::log(f.sd2) - 0.5 * z2 * z2;
            const double m = std::max(a, b);
            const double ea = std::exp(a - m), eb = std::exp(b - m);
            r[i] = ea / (ea + eb);
            ll += m + std::log(ea + eb);
        }
        ll -= 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
        f.loglik = ll;
        f.iterations = it;
        if (std::abs(ll - prev) < o.tol) {
            f.converged = true;
            return true;
        }
        prev = ll;

        // M-step.
        double s1 = 0.0, m1 = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s1 += r[i];
            m1 += r[i] * x[i];
            m2 += (1.0 - r[i]) * x[i];
        }
        const double s2 = static_cast<double>(n) - s1;
        if (s1 < 1e-8 || s2 < 1e-8) return false;
        f.w = s1 / static_cast<double>(n);
        f.mu1 = m1 / s1;
        f.mu2 = m2 / s2;
        if (o.variance == MixtureVariance::fixed_unit) continue;
        double v1 = 0.0, v2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v1 += r[i] * (x[i] - f.mu1) * (x[i] - f.mu1);
            v2 += (1.0 - r[i]) * (x[i] - f.mu2) * (x[i] - f.mu2);
        }
        if (o.variance == MixtureVariance::common) {
            f.sd1 = f.sd2 = std::sqrt((v1 + v2) / static_cast<double>(n));
        } else {
            f.sd1 = std::sqrt(v1 / s1);
            f.sd2 = std::sqrt(v2 / s2);
        }
        if (!(f.sd1 > sd_floor) || !(f.sd2 > sd_floor)) return false;
    }
    return true;
}

}  // namespace detail

/// Two-component EM with restarts: the first starts at the 0.25/0.75 sample
/// quantiles, the rest at random quantile pairs. The best finite fit wins;
/// `converged` reports whether it met the tolerance within max_iter.
inline MixtureFit fit_mixture_em(const Sample& x, const MixtureOptions& o = {}) {
    o.validate();
    if (x.size() < 2) throw ConfigError("fit_mixture_em: need at least two observations");
    std::vector<double> s(x);
    std::sort(s.begin(), s.end());
    const NormalFit base = fit_normal(x);
    const double sd_floor = 1e-6 * base.sd;
    RngStream rng(o.seed, 0xe3);

    MixtureFit best;
    best.loglik = -std::numeric_limits<double>::infinity();
    std::vector<EmRestart> trace;
    for (int k = 0; k < o.restarts; ++k) {
        double p1 = 0.25, p2 = 0.75;
        if (k > 0) {
            p1 = rng.uniform();
            p2 = rng.uniform();
        }
        MixtureFit f;
        f.w = 0.5;
        f.mu1 = detail::sorted_quantile(s, p1);
        f.mu2 = detail::sorted_quantile(s, p2);
        const double sd0 = o.variance == MixtureVariance::fixed_unit ? 1.0 : base.sd;
        f.sd1 = f.sd2 = sd0;
        const bool ok = detail::run_em(x, f, o, sd_floor) && std::isfinite(f.loglik);
        trace.push_back({f.loglik, f.iterations, f.converged, !ok});
        if (ok && f.loglik > best.loglik) best = f;
    }
    if (!std::isfinite(best.loglik)) {
        std::ostringstream msg;
        msg << "fit_mixture_em: every restart degenerated;";
        for (std::size_t k = 0; k < trace.size(); ++k)
            msg << " [" << k << ": iter " << trace[k].iterations << ", loglik " << trace[k].loglik << "]";
        throw NumericError(msg.str());
    }
    best.trace = std::move(trace);
    return best;
}

/// log{L_{D₁}(m̂_{D₁}, ŝ_{D₁}) / L_{D₁}(mixture fit on D₂)}.
inline double mixture_log_ratio(const Sample& x, const SplitSpec& split, const MixtureOptions& o) {
    auto [d1, d2] = split.apply(x);
    const NormalFit nf = fit_normal(d1);
    return normal_log_lik(nf.mean, nf.sd, d1) - mixture_log_lik(fit_mixture_em(d2, o), d1);
}

inline SlrTestResult mixture_slr(const Sample& x, const SplitSpec& split, double alpha, const MixtureOptions& o = {}) {
    if (x.size() < 4) throw ConfigError("mixture test: need at least four observations");
    split.validate(x.size());
    SlrTestResult r;
    r.log_ratio = mixture_log_ratio(x, split, o);
    r.p_value = std::min(1.0, std::exp(r.log_ratio));
    r.reject = r.log_ratio < std::log(alpha);
    return r;
}

struct MixtureTestResult {
    SlrTestResult slr;
    bool reject = false;
    double plausibility = 1.0;
    double std_error = 0.0;
    ParameterPoint argmax;  // (m, s)
    double alpha_at_argmax = 1.0;
    bool plugin = false;
};

/// IM mixture test for a fixed (n, split, EM options). Null ϑ = (m, s) with
/// X = m + sU, U ~ N(0, I); the ratio statistic is location-scale invariant,
/// so the focal levels ℓ(u) = min{1, exp R(m + su)} are free of ϑ and one
/// table serves every data set of size n.
class MixtureIm {
public:
    MixtureIm(std::size_t n, SplitSpec split, MixtureOptions opt, const McConfig& mc)
        : n_(n), split_(std::move(split)), opt_(opt) {
        if (n < 4) throw ConfigError("mixture test: need at least four observations");
        split_.validate(n);
        opt_.validate();
        RandomSetLaw law;
        law.sample_u = [n](RngStream& rng) {
            Sample u(n);
            for (auto& v : u) v = rng.normal();
            return u;
        };
        law.focal.level = [split = split_, opt = opt_](const ParameterPoint& th, const Sample& u) {
            Sample y(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) y[i] = th[0] + th[1] * u[i];
            return std::min(1.0, std::exp(mixture_log_ratio(y, split, opt)));
        };
        law.focal.contains = [lvl = law.focal.level](double a, const ParameterPoint& th, const Sample& u) {
            return lvl(th, u) >= a;
        };
        law.focal.invariance_key = [](const ParameterPoint&) { return std::vector<double>{}; };
        law.focal.in_domain = [](const ParameterPoint& th) { return th.size() == 2 && th[1] > 0.0; };
        engine_ = std::make_shared<const PlausibilityEngine>(std::move(law), mc);
    }

    const PlausibilityEngine& engine() const { return *engine_; }
    const SplitSpec& split() const { return split_; }

    /// α(x,ϑ) = min{1, L_{D₁x}(ϑ)/L_{D₁x}(mixture fit on D₂x)}.
    double index(const Sample& x, const ParameterPoint& th) const {
        auto [d1, d2] = split_.apply(x);
        const double alt = mixture_log_lik(fit_mixture_em(d2, opt_), d1);
        return std::min(1.0, std::exp(normal_log_lik(th[0], th[1], d1) - alt));
    }

    /// π_x(ϑ), capped at α(x,ϑ).
    PointPlausibility plausibility(const Sample& x, const ParameterPoint& th) const {
        PointPlausibility p;
        p.alpha = index(x, th);
        if (p.alpha >= 1.0) {
            p.value = 1.0;
            return p;
        }
        const McEstimate e = engine_->plausibility(th, p.alpha);
        p.value = std::min(e.value, p.alpha);
        p.std_error = e.std_error;
        return p;
    }

    /// With the level table free of ϑ, π_x is non-decreasing in α(x,ϑ), so its
    /// sup over Θ₀ sits at the D₁ null MLE, where α(x,ϑ) equals the SLR p-value.
    /// The plug-in variant evaluates at the full-data null MLE instead.
    MixtureTestResult test(const Sample& x, double alpha, bool plugin = false) const {
        if (x.size() != n_) throw ConfigError("mixture test: sample size differs from the table's");
        MixtureTestResult r;
        r.slr = mixture_slr(x, split_, alpha, opt_);
        r.plugin = plugin;
        NormalFit nf = plugin ? fit_normal(x) : fit_normal(split_.apply(x).first);
        r.argmax = ParameterPoint{nf.mean, nf.sd};
        const PointPlausibility p = plausibility(x, r.argmax);
        r.plausibility = p.value;
        r.std_error = p.std_error;
        r.alpha_at_argmax = p.alpha;
        r.reject = r.plausibility <= alpha;
        return r;
    }

private:
    std::size_t n_;
    SplitSpec split_;
    MixtureOptions opt_;
    std::shared_ptr<const PlausibilityEngine> engine_;
};

inline MixtureTestResult mixture_test(const Sample& x, const SplitSpec& split, double alpha, const McConfig& mc,
                                      bool plugin = false, const MixtureOptions& o = {}) {
    return MixtureIm(x.size(), split, o, mc).test(x, alpha, plugin);
}

/// ½N(−μ, 1) + ½N(μ, 1).
inline Sample sample_symmetric_mixture(std::size_t n, double mu, RngStream& rng) {
    Sample x(n);
    for (auto& v : x) v = (rng.uniform() < 0.5 ? -mu : mu) + rng.normal();
    return x;
}

}  // namespace imkit
