#pragma once

// Empirical checks: validity curves and dominance verdicts, power curves with
// matched data across methods, and the false-confidence comparisons.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "imkit/error.hpp"
#include "imkit/models/behrens_fisher.hpp"
#include "imkit/models/binomial.hpp"
#include "imkit/models/confidence_distribution.hpp"
#include "imkit/models/normal_means.hpp"
#include "imkit/np/dkw.hpp"
#include "imkit/parallel.hpp"
#include "imkit/random_set.hpp"
#include "imkit/rng.hpp"
#include "imkit/special.hpp"
#include "imkit/universal/slr.hpp"

namespace imkit {

inline std::vector<double> default_validity_grid(std::size_t k = 101) {
    std::vector<double> g(k);
    for (std::size_t i = 0; i < k; ++i) g[i] = static_cast<double>(i) / static_cast<double>(k - 1);
    return g;
}

struct CurveMeta {
    std::string model;
    std::string theta;
    std::string assertion;
    std::size_t n_rep = 0;
    std::uint64_t seed = 0;
    std::string note;
};

inline CurveMeta curve_meta(std::string model, std::string theta, std::string assertion) {
    CurveMeta m;
    m.model = std::move(model);
    m.theta = std::move(theta);
    m.assertion = std::move(assertion);
    return m;
}

/// G_θ(α) = P_{X|θ}{Π̄_X(A) ≤ α} on a grid.
struct ValidityCurve {
    std::vector<double> alphas;
    std::vector<double> g_values;
    std::vector<double> std_errors;
    std::vector<double> samples;  // Π̄_X(A) per replicate, replicate order
    CurveMeta meta;
};

/// One simulated capacity value Π̄_X(A), X drawn from the given stream.
using CapacityDraw = std::function<double(RngStream&)>;

inline ValidityCurve validity_curve(const CapacityDraw& draw, const McConfig& mc, CurveMeta meta = {},
                                    std::vector<double> alphas = default_validity_grid(), unsigned threads = 1) {
    mc.validate();
    ValidityCurve c;
    c.samples.resize(mc.n_rep);
    parallel_for(mc.n_rep, threads, [&](std::size_t r) {
        RngStream rng(mc.seed, r);
        c.samples[r] = draw(rng);
    });
    std::vector<double> sorted(c.samples);
    std::sort(sorted.begin(), sorted.end());
    c.alphas = std::move(alphas);
    for (double a : c.alphas) {
        const auto hits = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), a) - sorted.begin());
        const McEstimate e = McEstimate::proportion(hits, mc.n_rep);
        c.g_values.push_back(e.value);
        c.std_errors.push_back(e.std_error);
    }
    meta.n_rep = mc.n_rep;
    meta.seed = mc.seed;
    c.meta = std::move(meta);
    return c;
}

enum class Verdict { pass, inconclusive, fail };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::inconclusive: return "inconclusive";
        case Verdict::fail: return "fail";
    }
    return "unknown";
}

struct DominanceRow {
    double alpha = 0.0;
    double g = 0.0;
    double std_error = 0.0;
    bool ok = true;
};

struct DominanceReport {
    Verdict verdict = Verdict::pass;
    bool pass = true;  // no point above α + 3·stderr
    std::vector<DominanceRow> rows;
    double max_excess = 0.0;  // max of g − α
};

/// Pass iff G(α) ≤ α + 3·stderr at every checked α. A passing curve with some
/// G(α) > α + 2·stderr is reported inconclusive. `only` restricts the checked α values.
inline DominanceReport dominance_check(const ValidityCurve& c, const std::vector<double>& only = {}) {
    DominanceReport r;
    bool straddles = false;
    r.max_excess = -1.0;
    for (std::size_t i = 0; i < c.alphas.size(); ++i) {
        const double a = c.alphas[i];
        if (!only.empty() &&
            std::none_of(only.begin(), only.end(), [a](double b) { return std::abs(a - b) < 1e-12; }))
            continue;
        DominanceRow row{a, c.g_values[i], c.std_errors[i], c.g_values[i] <= a + 3.0 * c.std_errors[i]};
        r.pass = r.pass && row.ok;
        straddles = straddles || (row.ok && row.g > a + 2.0 * row.std_error);
        r.max_excess = std::max(r.max_excess, row.g - a);
        r.rows.push_back(row);
    }
    r.verdict = !r.pass ? Verdict::fail : (straddles ? Verdict::inconclusive : Verdict::pass);
    return r;
}

/// Validity curve restricted to a sparse α list (the curve's own grid is the list).
inline ValidityCurve validity_curve_at(const CapacityDraw& draw, const McConfig& mc, CurveMeta meta,
                                       const std::vector<double>& alphas, unsigned threads = 1) {
    return validity_curve(draw, mc, std::move(meta), alphas, threads);
}

// ---------------------------------------------------------------------------
// Power curves.

/// Decisions of several methods on one data set.
struct PowerTrial {
    std::vector<std::string> methods;
    std::function<std::vector<bool>(const Sample& x)> decide;
};

using DataGenerator = std::function<Sample(double param, RngStream& rng)>;

struct PowerCurve {
    std::vector<double> param_grid;
    std::vector<std::string> methods;
    std::vector<std::vector<double>> power;       // [method][grid point]
    std::vector<std::vector<double>> std_errors;  // [method][grid point]
    std::size_t n_rep = 0;
    std::uint64_t seed = 0;
    std::string note;
    /// Replicates where method `dominated` rejects and `dominating` does not.
    std::optional<std::pair<std::size_t, std::size_t>> domination;
    std::vector<std::size_t> violations;
};

/// Each replicate's data set is shared by all methods (matched seeds).
inline PowerCurve power_curve(const PowerTrial& trial, const std::vector<double>& grid, const DataGenerator& gen,
                              const McConfig& mc, unsigned threads = 1,
                              std::optional<std::pair<std::size_t, std::size_t>> domination = {}) {
    mc.validate();
    const std::size_t m = trial.methods.size();
    PowerCurve pc;
    pc.param_grid = grid;
    pc.methods = trial.methods;
    pc.n_rep = mc.n_rep;
    pc.seed = mc.seed;
    pc.domination = domination;
    pc.power.assign(m, std::vector<double>(grid.size()));
    pc.std_errors.assign(m, std::vector<double>(grid.size()));
    pc.violations.assign(grid.size(), 0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<std::vector<bool>> dec(mc.n_rep);
        parallel_for(mc.n_rep, threads, [&](std::size_t r) {
            RngStream rng = RngStream(mc.seed, k).derive(r);
            dec[r] = trial.decide(gen(grid[k], rng));
            if (dec[r].size() != m) throw ConfigError("power_curve: trial returned the wrong number of decisions");
        });
        for (std::size_t j = 0; j < m; ++j) {
            std::size_t hits = 0;
            for (const auto& d : dec) hits += d[j] ? 1 : 0;
            const McEstimate e = McEstimate::proportion(hits, mc.n_rep);
            pc.power[j][k] = e.value;
            pc.std_errors[j][k] = e.std_error;
        }
        if (domination)
            for (const auto& d : dec)
                if (d[domination->first] && !d[domination->second]) ++pc.violations[k];
    }
    return pc;
}

// ---------------------------------------------------------------------------
// Shipped validity scenarios: Π̄_X({θ}) = π_X(θ) at the true θ.

struct ValidityScenario {
    std::string model;
    std::string theta;
    CapacityDraw draw;
};

inline ValidityScenario binomial_validity_scenario(int n, double theta) {
    return {"binomial", "n=" + std::to_string(n) + " theta=" + std::to_string(theta), [n, theta](RngStream& rng) {
                const int x = dist::binomial_quantile(n, theta, rng.uniform());
                return models::binomial_im_value(n, x, theta);
            }};
}

inline ValidityScenario normal_mean_validity_scenario(int n, double theta, const McConfig& inner) {
    auto engine = std::make_shared<const PlausibilityEngine>(models::z_interval_random_set(n), inner);
    auto index = models::z_index_evaluator(n);
    return {"normal mean", "n=" + std::to_string(n) + " theta=" + std::to_string(theta),
            [engine, index, n, theta](RngStream& rng) {
                const double xbar = theta + rng.normal() / std::sqrt(static_cast<double>(n));
                return point_plausibility(*engine, index, {xbar}, ParameterPoint{theta}).value;
            }};
}

/// Data (D, V₁, V₂) from N(μ₁, σ₁²)ⁿ¹ × N(μ₂, σ₂²)ⁿ², evaluated at the true ϑ = (μ₁−μ₂, σ₁², σ₂²).
inline ValidityScenario behrens_fisher_validity_scenario(int n1, int n2, double phi, double s1, double s2,
                                                         const McConfig& inner) {
    auto engine = std::make_shared<const PlausibilityEngine>(models::bf_random_set(n1, n2), inner);
    auto index = models::bf_index_evaluator(n1, n2);
    return {"behrens-fisher",
            "n1=" + std::to_string(n1) + " n2=" + std::to_string(n2) + " var1=" + std::to_string(s1) +
                " var2=" + std::to_string(s2),
            [=](RngStream& rng) {
                const double d = phi + rng.normal() * std::sqrt(s1 / n1 + s2 / n2);
                const double v1 = s1 * rng.chi_squared(n1 - 1) / (n1 - 1);
                const double v2 = s2 * rng.chi_squared(n2 - 1) / (n2 - 1);
                return point_plausibility(*engine, index, {d, v1, v2}, ParameterPoint{phi, s1, s2}).value;
            }};
}

inline ValidityScenario dkw_validity_scenario(std::size_t n, DistributionHandle F, const McConfig& inner) {
    auto im = std::make_shared<const DkwIm>(n, inner);
    const std::string label = F.label;
    return {"dkw", "n=" + std::to_string(n) + " F=" + label, [im, F = std::move(F), n](RngStream& rng) {
                Sample x(n);
                for (auto& v : x) v = F.quantile(rng.uniform());
                return im->plausibility(EmpiricalSample(x), F).value;
            }};
}

inline ValidityScenario slr_normal_validity_scenario(std::size_t n, double theta, const McConfig& inner) {
    const std::size_t m1 = n / 2, m2 = n - n / 2;
    auto engine = std::make_shared<const PlausibilityEngine>(slr_normal_random_set(m1, m2), inner);
    IndexEvaluator index = [m1](const Sample& x, const ParameterPoint& th) -> IndexResult {
        return {slr_normal_index(x[0], x[1], m1, th[0]), true};
    };
    return {"slr-normal", "n=" + std::to_string(n) + " theta=" + std::to_string(theta),
            [=](RngStream& rng) {
                const double a = theta + rng.normal() / std::sqrt(static_cast<double>(m1));
                const double b = theta + rng.normal() / std::sqrt(static_cast<double>(m2));
                return point_plausibility(*engine, index, {a, b}, ParameterPoint{theta}).value;
            }};
}

inline DistributionHandle normal_distribution_handle(double mean, double sd) {
    DistributionHandle h;
    h.kind = DistributionKind::parametric;
    h.cdf = [=](double t) { return dist::normal_cdf((t - mean) / sd); };
    h.quantile = [=](double p) { return mean + sd * dist::normal_quantile(p); };
    h.density = [=](double t) { return dist::normal_pdf((t - mean) / sd) / sd; };
    h.label = "N(" + std::to_string(mean) + "," + std::to_string(sd * sd) + ")";
    return h;
}

inline DistributionHandle exponential_distribution_handle(double rate) {
    DistributionHandle h;
    h.kind = DistributionKind::parametric;
    h.cdf = [=](double t) { return t <= 0.0 ? 0.0 : -std::expm1(-rate * t); };
    h.quantile = [=](double p) { return -std::log1p(-p) / rate; };
    h.density = [=](double t) { return t < 0.0 ? 0.0 : rate * std::exp(-rate * t); };
    h.label = "Exp(" + std::to_string(rate) + ")";
    return h;
}

// ---------------------------------------------------------------------------
// False confidence.

struct FalseConfidenceReport {
    std::string scenario;
    ValidityCurve cd_curve;  // additive Π_X(A) at a true A
    ValidityCurve im_curve;  // consonant Π̄_X(A) at the same A and seeds
    DominanceReport cd_dominance;
    DominanceReport im_dominance;
    double cd_false_mean = 0.0;  // mean Π_X of the false complement of A
};

struct FalseConfidenceOptions {
    std::size_t n_rep = 2000;
    std::uint64_t seed = 20210601;
    std::size_t cd_draws = 4000;  // ratio-CD Monte Carlo size
    unsigned threads = 1;
};

/// "false-confidence-abs": X ~ N(0.5, 1), A = {|ϑ| ≤ 0.5}.
/// "false-confidence-fc": X ~ N₂((1, 0.1), I₂), φ = 10, A = (9, ∞), false B = (−∞, 9].
inline FalseConfidenceReport false_confidence_demo(const std::string& scenario, const FalseConfidenceOptions& o = {}) {
    const McConfig mc{o.n_rep, o.seed};
    FalseConfidenceReport r;
    r.scenario = scenario;
    if (scenario == "false-confidence-abs") {
        const double theta = 0.5, c = 0.5;
        r.cd_curve = validity_curve(
            [=](RngStream& rng) { return models::cd_abs_probability(theta + rng.normal(), c); }, mc,
            curve_meta("normal CD", "0.5", "|theta| <= 0.5"), default_validity_grid(), o.threads);
        r.im_curve = validity_curve(
            [=](RngStream& rng) { return models::scalar_upper_interval(theta + rng.normal(), -c, c); }, mc,
            curve_meta("consonant IM", "0.5", "|theta| <= 0.5"), default_validity_grid(), o.threads);
        double s = 0.0;
        for (double v : r.cd_curve.samples) s += 1.0 - v;
        r.cd_false_mean = s / static_cast<double>(r.cd_curve.samples.size());
    } else if (scenario == "false-confidence-fc") {
        const double t1 = 1.0, t2 = 0.1, c = 9.0;
        auto probe = std::make_shared<const models::RatioCdProbe>(o.cd_draws, o.seed ^ 0xfc);
        r.cd_curve = validity_curve(
            [=](RngStream& rng) {
                const double x1 = t1 + rng.normal(), x2 = t2 + rng.normal();
                return 1.0 - probe->below(x1, x2, c);
            },
            mc, curve_meta("ratio CD", "(1,0.1)", "phi > 9"), default_validity_grid(), o.threads);
        r.im_curve = validity_curve(
            [=](RngStream& rng) {
                const double x1 = t1 + rng.normal(), x2 = t2 + rng.normal();
                return models::fc_naive_half_line_sup({x1, x2}, c, true);
            },
            mc, curve_meta("consonant IM", "(1,0.1)", "phi > 9"), default_validity_grid(), o.threads);
        r.cd_curve.meta.note = "CD probability by Monte Carlo with " + std::to_string(o.cd_draws) + " draws";
        double s = 0.0;
        for (double v : r.cd_curve.samples) s += 1.0 - v;
        r.cd_false_mean = s / static_cast<double>(r.cd_curve.samples.size());
    } else {
        throw ConfigError("unknown false-confidence scenario: " + scenario);
    }
    r.cd_dominance = dominance_check(r.cd_curve);
    r.im_dominance = dominance_check(r.im_curve);
    return r;
}

}  // namespace imkit
