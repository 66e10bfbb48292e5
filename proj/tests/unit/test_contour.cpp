#include <gtest/gtest.h>

#include <cmath>

#include "imkit/contour.hpp"
#include "imkit/models/binomial.hpp"
#include "imkit/models/normal_means.hpp"
#include "imkit/special.hpp"

using namespace imkit;

namespace {

Contour gaussian_bump(double centre) {
    Contour c;
    c.domain = Domain::interval(centre - 10.0, centre + 10.0);
    c.eval = [centre](const ParameterPoint& t) { return std::exp(-0.5 * (t[0] - centre) * (t[0] - centre)); };
    return c;
}

}  // namespace

TEST(Contour, ClampsAndRejectsNan) {
    Contour c;
    c.domain = Domain::interval(0, 1);
    c.eval = [](const ParameterPoint& t) { return t[0] > 0.5 ? 1.5 : std::nan(""); };
    EXPECT_EQ(c(0.9), 1.0);
    EXPECT_THROW(c(0.1), NumericError);
}

TEST(ConsonantMeasure, WholeSpaceIsOne) {
    ConsonantMeasure m(gaussian_bump(0.3));
    EXPECT_NEAR(m.upper(Assertion::whole()), 1.0, 1e-12);
    EXPECT_NEAR(m.lower(Assertion::whole()), 1.0, 1e-12);
}

TEST(ConsonantMeasure, EmptyAssertionIsZero) {
    ConsonantMeasure m(gaussian_bump(0.0));
    EXPECT_EQ(m.upper(Assertion::empty()), 0.0);
    EXPECT_EQ(m.lower(Assertion::empty()), 0.0);
}

TEST(ConsonantMeasure, SingletonIsContourValue) {
    const Contour c = gaussian_bump(0.0);
    ConsonantMeasure m(c);
    EXPECT_DOUBLE_EQ(m.upper(Assertion::singleton(ParameterPoint{1.2})), c(1.2));
    // Continuous model: the complement of a point has sup 1.
    EXPECT_NEAR(m.lower(Assertion::singleton(ParameterPoint{1.2})), 0.0, 1e-9);
}

TEST(ConsonantMeasure, BinomialUpperMatchesBruteForceGrid) {
    ConsonantMeasure m(models::binomial_cp_contour({25, 17}));
    double brute = 0.0;
    for (int i = 0; i <= 1000; ++i) brute = std::max(brute, models::binomial_cp_index(25, 17, 0.5 + 1e-4 * i));
    const double up = m.upper(Assertion::interval(0.5, 0.6));
    EXPECT_GE(up, brute - 1e-12);
    EXPECT_NEAR(up, brute, 1e-6);
}

TEST(ConsonantMeasure, LowerNeverExceedsUpper) {
    ConsonantMeasure m(gaussian_bump(0.0));
    for (auto a : {Assertion::interval(-1, 0.5), Assertion::interval(2, 3), Assertion::interval(-20, 20)})
        EXPECT_LE(m.lower(a), m.upper(a) + 1e-12);
}

TEST(ConsonantMeasure, MaxitivityOnDisjointSets) {
    ConsonantMeasure m(gaussian_bump(0.0));
    const auto a = Assertion::finite({ParameterPoint{0.5}, ParameterPoint{2.0}});
    const auto b = Assertion::finite({ParameterPoint{-1.0}});
    const auto ab = Assertion::finite({ParameterPoint{0.5}, ParameterPoint{2.0}, ParameterPoint{-1.0}});
    EXPECT_DOUBLE_EQ(m.upper(ab), std::max(m.upper(a), m.upper(b)));
}

TEST(ConsonantMeasure, LowerOfConfidenceRegionIsOneMinusAlpha) {
    // Normal contour 2{1 − Φ(|ϑ − x|)}: the 1−α region is x ± z*.
    Contour c;
    c.domain = Domain::interval(-10, 10);
    c.eval = [](const ParameterPoint& t) { return 2.0 * (1.0 - dist::normal_cdf(std::abs(t[0] - 0.4))); };
    ConsonantMeasure m(c);
    const double z = dist::normal_quantile(0.95);
    EXPECT_NEAR(m.lower(Assertion::interval(0.4 - z, 0.4 + z)), 0.9, 1e-8);
}

TEST(PlausibilityRegion, LevelZeroIsWholeDomain) {
    Contour c;
    c.domain = Domain::interval(-3, 3);
    c.eval = [](const ParameterPoint& t) { return std::exp(-t[0] * t[0]) * 0.999 + 0.0005; };
    const auto r = plausibility_region(c, 0.0);
    ASSERT_EQ(r.intervals.size(), 1u);
    EXPECT_EQ(r.intervals[0].first, -3.0);
    EXPECT_EQ(r.intervals[0].second, 3.0);
}

TEST(PlausibilityRegion, AboveSupIsEmptyNotError) {
    Contour c = gaussian_bump(0.0);
    c.eval = [](const ParameterPoint& t) { return 0.5 * std::exp(-t[0] * t[0]); };
    const auto r = plausibility_region(c, 0.6);
    EXPECT_TRUE(r.empty);
}

TEST(PlausibilityRegion, BimodalContourGivesTwoIntervals) {
    Contour c;
    c.domain = Domain::interval(-5, 5);
    c.eval = [](const ParameterPoint& t) {
        return std::max(std::exp(-4 * (t[0] - 2) * (t[0] - 2)), std::exp(-4 * (t[0] + 2) * (t[0] + 2)));
    };
    const auto r = plausibility_region(c, 0.5);
    ASSERT_EQ(r.intervals.size(), 2u);
    const double h = std::sqrt(std::log(2.0) / 4.0);
    EXPECT_NEAR(r.intervals[0].first, -2 - h, 1e-8);
    EXPECT_NEAR(r.intervals[1].second, 2 + h, 1e-8);
}

TEST(PlausibilityRegion, ShrinksAsLevelGrows) {
    const Contour c = models::binomial_im_contour({25, 17});
    const auto a = plausibility_region(c, 0.01), b = plausibility_region(c, 0.05), d = plausibility_region(c, 0.2);
    ASSERT_EQ(a.intervals.size(), 1u);
    ASSERT_EQ(b.intervals.size(), 1u);
    ASSERT_EQ(d.intervals.size(), 1u);
    EXPECT_LE(a.intervals[0].first, b.intervals[0].first);
    EXPECT_LE(b.intervals[0].first, d.intervals[0].first);
    EXPECT_GE(a.intervals[0].second, b.intervals[0].second);
    EXPECT_GE(b.intervals[0].second, d.intervals[0].second);
}

TEST(PlausibilityRegion, RespectsLevelOnProbes) {
    const Contour c = models::binomial_cp_contour({25, 17});
    const auto r = plausibility_region(c, 0.05);
    for (int i = 1; i < 1000; ++i) {
        const double t = i / 1000.0;
        if (std::abs(t - r.intervals[0].first) < 1e-6 || std::abs(t - r.intervals[0].second) < 1e-6) continue;
        EXPECT_EQ(r.contains(t), c(t) > 0.05) << t;
    }
}

TEST(MarginalContour, IdentityFeatureReturnsInput) {
    const Contour c = gaussian_bump(1.0);
    const Contour m = marginal_contour(c, FiberSearch::identity(c.domain));
    for (double t : {-2.0, 0.0, 1.0, 3.3}) EXPECT_EQ(m(t), c(t));
}

TEST(MarginalContour, FirstMeanFiberSupAtSecondObservation) {
    const models::NormalMeans2DSetup s{1.333, 0.333};
    const auto cs = models::nm2d_contours(s);
    FiberSearch f;
    f.embed = [](const ParameterPoint& phi, const std::vector<double>& z) { return ParameterPoint{phi[0], z[0]}; };
    f.nuisance = Box::interval(-10, 10);
    f.phi_domain = Domain::interval(-5, 5);
    const Contour m = marginal_contour(cs.joint, f);
    for (double phi : {-1.0, 0.5, 1.333, 2.7}) EXPECT_NEAR(m(phi), cs.joint(ParameterPoint{phi, s.x2}), 1e-9);
}

TEST(MarginalContour, EmptyFiberGivesZero) {
    FiberSearch f = FiberSearch::identity(Domain::interval(0, 1));
    f.fiber_nonempty = [](const ParameterPoint& phi) { return phi[0] < 0.5; };
    const Contour m = marginal_contour(gaussian_bump(0.0), f);
    EXPECT_EQ(m(0.7), 0.0);
    EXPECT_GT(m(0.2), 0.0);
}

TEST(Assertion, ComplementOfIntervalInDomain) {
    const auto a = Assertion::interval(-1, 2);
    const auto c = a.complement(Domain::interval(-5, 5));
    EXPECT_TRUE(c.contains(ParameterPoint{-3.0}));
    EXPECT_TRUE(c.contains(ParameterPoint{4.0}));
    EXPECT_FALSE(c.contains(ParameterPoint{0.0}));
}
