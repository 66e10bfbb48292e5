#include <gtest/gtest.h>

#include <cmath>

#include "imkit/diagnostics.hpp"
#include "imkit/np/dkw.hpp"
#include "imkit/rng.hpp"
#include "imkit/special.hpp"

using namespace imkit;

namespace {

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return x;
}

DistributionHandle shifted_cdf(const EmpiricalSample& s, double shift) {
    DistributionHandle h;
    h.kind = DistributionKind::parametric;
    h.cdf = [s, shift](double t) { return std::clamp(s.cdf(t) + shift, 0.0, 1.0); };
    h.cdf_left = [s, shift](double t) { return std::clamp(s.cdf_left(t) + shift, 0.0, 1.0); };
    return h;
}

}  // namespace

TEST(Dkw, DeltaFormula) {
    EXPECT_NEAR(dkw_delta(100, 0.05), std::sqrt(std::log(40.0) / 200.0), 1e-15);
    EXPECT_TRUE(std::isinf(dkw_delta(10, 0.0)));
    EXPECT_EQ(dkw_delta(10, 2.0), 0.0);
}

TEST(Dkw, BandClampsAndContainsEcdf) {
    const EmpiricalSample s(normal_sample(50, 1));
    const DkwBand b = dkw_band(s, 0.05);
    ASSERT_EQ(b.t.size(), 50u);
    for (std::size_t i = 0; i < b.t.size(); ++i) {
        EXPECT_GE(b.lower[i], 0.0);
        EXPECT_LE(b.upper[i], 1.0);
        EXPECT_LE(b.lower[i], b.ecdf[i]);
        EXPECT_GE(b.upper[i], b.ecdf[i]);
    }
    EXPECT_EQ(b.upper.back(), 1.0);
    EXPECT_FALSE(b.degenerate);
}

TEST(Dkw, BandDegenerateLevels) {
    const EmpiricalSample s(normal_sample(20, 2));
    EXPECT_TRUE(dkw_band(s, 0.0).degenerate);
    EXPECT_TRUE(dkw_band(s, 1.0).degenerate);
    EXPECT_THROW(dkw_band(s, 1.5), ConfigError);
}

TEST(Dkw, KsDistanceMatchesBruteForceGrid) {
    const EmpiricalSample s(normal_sample(40, 3));
    const DistributionHandle F = normal_distribution_handle(0.3, 1.2);
    // Oracle: |F̂ − F| on a dense grid plus one-sided limits at each data point.
    double brute = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        const double t = -6.0 + 12.0 * i / 10000.0;
        brute = std::max(brute, std::abs(s.cdf(t) - F.cdf(t)));
    }
    for (double v : s.values()) {
        brute = std::max(brute, std::abs(s.cdf(v) - F.cdf(v)));
        brute = std::max(brute, std::abs(s.cdf(std::nextafter(v, -1e300)) - F.cdf(v)));
    }
    EXPECT_NEAR(ks_distance(s, F), brute, 1e-6);
}

TEST(Dkw, KsDistanceWithTies) {
    const EmpiricalSample s({0.0, 0.0, 1.0, 1.0});
    DistributionHandle F;
    F.cdf = [](double t) { return std::clamp(t, 0.0, 1.0); };
    EXPECT_NEAR(ks_distance(s, F), 0.5, 1e-15);
}

TEST(DkwIm, EcdfIsFullyPlausible) {
    const EmpiricalSample s(normal_sample(100, 4));
    const PointPlausibility p = dkw_plausibility(s, s.handle(), {2000, 5});
    EXPECT_EQ(p.value, 1.0);
}

TEST(DkwIm, LowerBandEdgeIsBelowLevel) {
    const std::size_t n = 100;
    const EmpiricalSample s(normal_sample(n, 6));
    const double d = dkw_delta(n, 0.05);
    const PointPlausibility p = dkw_plausibility(s, shifted_cdf(s, -d), {20000, 7});
    EXPECT_NEAR(p.alpha, 0.05, 1e-12);
    EXPECT_GT(p.value, 0.03);
    EXPECT_LT(p.value, 0.05);
}

TEST(DkwIm, DistantDistributionHasNoPlausibility) {
    const EmpiricalSample s(normal_sample(100, 8));
    const PointPlausibility p = dkw_plausibility(s, normal_distribution_handle(5.0, 1.0), {4000, 9});
    EXPECT_LT(p.value, 1e-6);
}

TEST(DkwIm, MonotoneInDistance) {
    const EmpiricalSample s(normal_sample(60, 10));
    const DkwIm im(60, {5000, 11});
    double prev = 2.0;
    for (double shift : {0.0, 0.05, 0.1, 0.15, 0.2, 0.3}) {
        const double v = im.plausibility(s, shifted_cdf(s, -shift)).value;
        EXPECT_LE(v, prev);
        prev = v;
    }
}

TEST(DkwIm, SingleObservationAgainstContinuousLaw) {
    // With n = 1 the KS distance of a uniform draw is max{u, 1 − u}, which
    // reaches d with probability 2(1 − d).
    const EmpiricalSample s({1.0});
    const double d = dist::normal_cdf(1.0);
    const PointPlausibility p = dkw_plausibility(s, normal_distribution_handle(0.0, 1.0), {20000, 12});
    EXPECT_NEAR(p.alpha, 2.0 * std::exp(-2.0 * d * d), 1e-12);
    EXPECT_NEAR(p.value, 2.0 * (1.0 - d), 4.0 * p.std_error);
}

TEST(DkwIm, SingleObservationAtItsOwnStepHasZeroPlausibility) {
    // F = F̂ shifted by one full unit puts the KS distance at 1.
    const EmpiricalSample s({0.0});
    const PointPlausibility p = dkw_plausibility(s, shifted_cdf(s, -1.0), {2000, 13});
    EXPECT_NEAR(p.alpha, 2.0 * std::exp(-2.0), 1e-12);
    EXPECT_EQ(p.value, 0.0);
}

TEST(DkwIm, SizeMismatchIsRejected) {
    const DkwIm im(10, {200, 1});
    EXPECT_THROW(im.plausibility(EmpiricalSample(normal_sample(11, 1)), normal_distribution_handle(0, 1)), ConfigError);
}

TEST(GrenanderPlugin, ExponentialDataArePlausible) {
    RngStream rng(14);
    std::vector<double> x(200);
    for (auto& v : x) v = -std::log(rng.uniform());
    const PointPlausibility p = grenander_plugin_plausibility(EmpiricalSample(x), {2000, 15});
    EXPECT_GT(p.value, 0.5);
}

TEST(GrenanderPlugin, NegativeDataRejected) {
    EXPECT_THROW(grenander_plugin_plausibility(EmpiricalSample({-1.0, 2.0}), {200, 1}), DomainError);
}
