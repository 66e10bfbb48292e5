#include <gtest/gtest.h>

#include <cmath>

#include "imkit/diagnostics.hpp"
#include "imkit/im_algorithm.hpp"
#include "imkit/models/behrens_fisher.hpp"
#include "imkit/models/binomial.hpp"
#include "imkit/models/normal_means.hpp"
#include "imkit/np/dkw.hpp"
#include "imkit/special.hpp"
#include "imkit/universal/slr.hpp"

using namespace imkit;

namespace {

/// Point-null z-test for a normal mean with n observations.
TestFamily z_test(int n, double theta0) {
    TestFamily t;
    t.name = "z-test";
    t.null_set = Assertion::singleton(ParameterPoint{theta0});
    t.p_value = [n, theta0](const Sample& x) {
        double m = 0.0;
        for (double v : x) m += v;
        return models::z_index(m / x.size(), n, theta0);
    };
    t.reject = [pv = t.p_value](double alpha, const Sample& x) { return pv(x) < alpha; };
    return t;
}

NullSearch point_search(double theta0) {
    NullSearch s;
    s.embed = [theta0](const std::vector<double>&) { return ParameterPoint{theta0}; };
    return s;
}

}  // namespace

TEST(FocalFromConfidence, DkwMembershipFreeOfF) {
    const Association a = builtin_association(AssociationKind::iid_quantile, {.n = 15});
    const FocalFamily f = focal_from_confidence(dkw_family(), a);
    const ParameterPoint F1(normal_distribution_handle(0, 1)), F2(exponential_distribution_handle(2.0));
    RngStream rng(5);
    for (int i = 0; i < 200; ++i) {
        const Sample u = a.sample_u(rng);
        std::vector<double> s(u);
        std::sort(s.begin(), s.end());
        const bool direct = ks_uniform_sorted(s) <= dkw_delta(15, 0.3) + 1e-12;
        EXPECT_EQ(f.contains(0.3, F1, u), direct);
        EXPECT_EQ(f.contains(0.3, F2, u), direct);
    }
}

TEST(FocalFromConfidence, HsuScheffeMatchesLambdaForm) {
    const int n1 = 5, n2 = 11;
    const Association a = builtin_association(AssociationKind::behrens_fisher, {.n1 = n1, .n2 = n2});
    const FocalFamily f = focal_from_confidence(models::hs_family(n1, n2), a);
    const double tstar = dist::student_t_quantile(4.0, 1.0 - 0.05 / 2.0);
    RngStream rng(6);
    for (int i = 0; i < 300; ++i) {
        const Sample u = a.sample_u(rng);
        const ParameterPoint th{0.3, 2.0, 0.4};
        const double l = models::bf_lambda(n1, n2, 2.0, 0.4);
        const double stat = std::abs(u[0]) / std::sqrt(l * u[1] + (1.0 - l) * u[2]);
        if (std::abs(stat - tstar) < 1e-9) continue;
        EXPECT_EQ(f.contains(0.05, th, u), stat <= tstar);
    }
}

TEST(FocalFromConfidence, ZIntervalSameForAllTheta) {
    const Association a = builtin_association(AssociationKind::normal_location, {.n = 4});
    const FocalFamily f = focal_from_confidence(models::z_interval_family(4), a);
    RngStream rng(7);
    for (int i = 0; i < 200; ++i) {
        const Sample u = a.sample_u(rng);
        const double ubar = (u[0] + u[1] + u[2] + u[3]) / 4.0;
        const bool direct = std::abs(ubar) <= dist::normal_quantile(0.95) / 2.0;
        EXPECT_EQ(f.contains(0.1, ParameterPoint{-3.0}, u), direct);
        EXPECT_EQ(f.contains(0.1, ParameterPoint{8.0}, u), direct);
    }
}

TEST(FocalFromTest, AlphaZeroIsWholeSpace) {
    const Association a = builtin_association(AssociationKind::normal_location, {.n = 3});
    const FocalFamily f = focal_from_test(z_test(3, 0.0), a);
    RngStream rng(1);
    for (int i = 0; i < 100; ++i) EXPECT_TRUE(f.contains(0.0, ParameterPoint{0.0}, a.sample_u(rng)));
}

TEST(FocalFromTest, OutsideNullIsDomainError) {
    const Association a = builtin_association(AssociationKind::normal_location, {.n = 3});
    const FocalFamily f = focal_from_test(z_test(3, 0.0), a);
    EXPECT_THROW(f.contains(0.1, ParameterPoint{1.0}, {0.0, 0.0, 0.0}), DomainError);
}

TEST(FocalFromTest, SplitLrNormalClosedForm) {
    // Split LR test of a point null through the half means; focal sets
    // {−ū₂² + 2ū₁ū₂ ≤ −(4/n) log α} for an even split.
    const int n = 40, m = 20;
    TestFamily t;
    t.null_set = Assertion::singleton(ParameterPoint{0.0});
    t.reject = [](double alpha, const Sample& x) { return slr_normal_index(x[0], x[1], 20, 0.0) < alpha; };
    const Association a = builtin_association(AssociationKind::split_normal, {.n1 = m, .n2 = m});
    const FocalFamily f = focal_from_test(t, a);
    RngStream rng(2);
    for (int i = 0; i < 500; ++i) {
        const Sample u = a.sample_u(rng);
        for (double alpha : {0.01, 0.05, 0.3}) {
            const double q = -u[1] * u[1] + 2.0 * u[0] * u[1];
            const double rhs = -4.0 / n * std::log(alpha);
            if (std::abs(q - rhs) < 1e-10) continue;
            EXPECT_EQ(f.contains(alpha, ParameterPoint{0.0}, u), q <= rhs);
        }
    }
}

TEST(IndexAlpha, DkwAtEcdfIsOne) {
    const Sample x{0.3, 1.2, 0.7, 2.2};
    const EmpiricalSample s(x);
    EXPECT_EQ(dkw_index_evaluator()(x, ParameterPoint(s.handle())).alpha, 1.0);
}

TEST(IndexAlpha, HsuScheffeAtObservedDifferenceIsOne) {
    const auto s = models::BehrensFisherSetup::travel_times();
    EXPECT_EQ(models::bf_index_evaluator(5, 11)(s.x(), ParameterPoint{s.d(), 1.0, 1.0}).alpha, 1.0);
}

TEST(IndexAlpha, BinomialUpperBranch) {
    for (double t : {0.3, 0.45, 0.5}) {
        ASSERT_GE(dist::binomial_cdf(25, t, 16), 0.5);
        EXPECT_NEAR(models::binomial_cp_index(25, 17, t), 2.0 * (1.0 - dist::binomial_cdf(25, t, 16)), 1e-15);
    }
}

TEST(IndexAlpha, GenericPathMatchesClosedForm) {
    const Association a = builtin_association(AssociationKind::normal_location, {.n = 4});
    const FocalFamily f = focal_from_confidence(models::z_interval_family(4), a);
    const IndexEvaluator generic = index_alpha(f, a);
    const Sample x{0.1, -0.4, 1.2, 0.3};
    for (double t : {-1.0, 0.0, 0.3, 0.9})
        EXPECT_NEAR(generic(x, ParameterPoint{t}).alpha, models::z_index(0.3, 4, t), 2e-8);
}

TEST(ImFromConfidence, ZIntervalReproducesInputRegion) {
    const Association a = builtin_association(AssociationKind::normal_location, {.n = 4});
    const Sample x{0.1, -0.4, 1.2, 0.3};
    const ImBuild b = im_from_confidence(models::z_interval_family(4), a, x, Domain::interval(-3, 3), {20000, 5});
    for (double t = -1.5; t < 2.0; t += 0.1) {
        const double exact = models::z_index(0.3, 4, t);
        const double se = std::sqrt(exact * (1 - exact) / 20000.0);
        EXPECT_NEAR(b.contour(t), exact, 4.0 * se + 1e-9) << t;
    }
}

TEST(ImFromConfidence, ClopperPearsonGivesBlakerInsideCp) {
    const Association a = builtin_association(AssociationKind::binomial_quantile, {.n = 25});
    const ImBuild b = im_from_confidence(models::binomial_cp_family(25), a, {17.0}, Domain::interval(0, 1),
                                         {5000, 6}, models::binomial_cp_index_evaluator(25));
    int strictly_below = 0;
    for (double t = 0.3; t < 0.95; t += 0.025) {
        const double cp = models::binomial_cp_index(25, 17, t);
        const double im = b.contour(t);
        const double exact = models::binomial_im_value(25, 17, t);
        const double se = std::sqrt(exact * (1 - exact) / 5000.0);
        EXPECT_LE(im, cp + 4.0 * se + 1e-12) << t;
        EXPECT_NEAR(im, exact, 4.0 * se + 1e-9) << t;
        strictly_below += im < cp - 0.01;
    }
    EXPECT_GT(strictly_below, 0);
}

TEST(ImTest, PointNullIsSingleEvaluation) {
    const Association a = builtin_association(AssociationKind::normal_location, {.n = 4});
    const Sample x{0.9, 1.4, 0.2, 1.1};
    const auto r = im_test(z_test(4, 0.0), a, point_search(0.0), x, 0.05, {20000, 3}, models::z_index_evaluator(4));
    EXPECT_EQ(r.argmax, ParameterPoint{0.0});
    const double p = models::z_index(0.9, 4, 0.0);
    EXPECT_NEAR(r.plausibility, p, 4.0 * std::sqrt(p * (1 - p) / 20000.0));
    EXPECT_FALSE(r.plugin);
}

TEST(ImTest, SplitLrDominationAndPvalueOrdering) {
    const int m = 20;
    auto eng = PlausibilityEngine(slr_normal_random_set(m, m), {10000, 8});
    IndexEvaluator idx = [m](const Sample& x, const ParameterPoint& th) -> IndexResult {
        return {slr_normal_index(x[0], x[1], m, th[0]), true};
    };
    RngStream rng(77);
    int slr_rejects = 0;
    for (int i = 0; i < 300; ++i) {
        const double shift = 0.6 * rng.uniform();
        const Sample x{shift + rng.normal() / std::sqrt(m), shift + rng.normal() / std::sqrt(m)};
        const double p = slr_normal_index(x[0], x[1], m, 0.0);
        const auto r = im_test(eng, idx, point_search(0.0), x, 0.05);
        EXPECT_LE(r.plausibility, p + 1e-12);
        if (p < 0.05) {
            ++slr_rejects;
            EXPECT_TRUE(r.reject);
        }
    }
    EXPECT_GT(slr_rejects, 0);
}

TEST(ImTest, PluginFlagged) {
    const Association a = builtin_association(AssociationKind::normal_location, {.n = 4});
    NullSearch s = point_search(0.0);
    s.plugin = ParameterPoint{0.0};
    const auto r = im_test(z_test(4, 0.0), a, s, {0.1, 0.2, 0.3, 0.4}, 0.05, {1000, 3}, models::z_index_evaluator(4));
    EXPECT_TRUE(r.plugin);
    EXPECT_FALSE(r.note.empty());
}

TEST(ImTest, MissingSearchIsReported) {
    const Association a = builtin_association(AssociationKind::normal_location, {.n = 2});
    const auto r = im_test(z_test(2, 0.0), a, NullSearch{}, {0.1, 0.2}, 0.05, {1000, 3}, models::z_index_evaluator(2));
    EXPECT_FALSE(r.search_ok);
}

TEST(Compatibility, NormalMeanPasses) {
    const Association a = builtin_association(AssociationKind::normal_location, {.n = 3});
    const FocalFamily f = focal_from_confidence(models::z_interval_family(3), a);
    const auto rep = compatibility_check(f, a, {{0.1, 0.5, -0.2}, {3.0, 2.0, 1.0}},
                                         {ParameterPoint{0.0}, ParameterPoint{2.0}}, {0.05, 0.5, 0.99}, {200, 1});
    EXPECT_TRUE(rep.all_pass);
}

TEST(Compatibility, UniformCredibleIntervalPasses) {
    // Flat-prior posterior for X_i ~ Unif(θ, θ+1) is uniform on [max − 1, min].
    ConfidenceFamily c;
    c.contains = [](double alpha, const Sample& x, const ParameterPoint& th) {
        const double lo = x[1] - 1.0, hi = x[0], w = hi - lo;
        return th[0] >= lo + 0.5 * alpha * w - 1e-12 && th[0] <= hi - 0.5 * alpha * w + 1e-12;
    };
    const Association a = builtin_association(AssociationKind::uniform_min_max, {.n = 5});
    const FocalFamily f = focal_from_confidence(c, a);
    const auto rep = compatibility_check(f, a, {{0.2, 0.9}, {1.05, 1.6}},
                                         {ParameterPoint{0.0}, ParameterPoint{1.0}}, {0.05, 0.5, 0.95}, {200, 1});
    EXPECT_TRUE(rep.all_pass);
}

TEST(Compatibility, NoncentralUpperBoundFailsBelowCentralCdf) {
    const double df = 3.0;
    ConfidenceFamily c;
    c.contains = [df](double alpha, const Sample& x, const ParameterPoint& th) {
        return dist::noncentral_chisq_cdf(df, th[0], x[0]) >= alpha;
    };
    const Association a = builtin_association(AssociationKind::noncentral_chisq, {.df = df});
    const FocalFamily f = focal_from_confidence(c, a);
    const double x = dist::noncentral_chisq_quantile(df, 0.0, 0.02);  // F₀(x) = 0.02
    const auto fail = compatibility_check(f, a, {{x}}, {ParameterPoint{1.0}}, {0.05}, {2000, 1});
    EXPECT_FALSE(fail.all_pass);
    const auto pass = compatibility_check(f, a, {{x}}, {ParameterPoint{1.0}}, {0.005}, {2000, 1});
    EXPECT_TRUE(pass.all_pass);
}
