#include <gtest/gtest.h>

#include <cmath>

#include "../support/blaker.hpp"
#include "imkit/contour.hpp"
#include "imkit/models/binomial.hpp"
#include "imkit/special.hpp"

using namespace imkit;
using namespace imkit::models;

TEST(BinomialSetup, Validation) {
    EXPECT_THROW((BinomialSetup{0, 0}.validate()), ConfigError);
    EXPECT_THROW((BinomialSetup{5, 6}.validate()), ConfigError);
    EXPECT_THROW((BinomialSetup{5, -1}.validate()), ConfigError);
    EXPECT_NO_THROW((BinomialSetup{25, 17}.validate()));
}

TEST(BinomialCp, PlateauIsOne) {
    const Contour c = binomial_cp_contour({25, 17});
    for (double t = 0.01; t < 1.0; t += 0.01) {
        const bool plateau = dist::binomial_cdf(25, t, 16) < 0.5 && 0.5 < dist::binomial_cdf(25, t, 17);
        if (plateau) {
            EXPECT_EQ(c(t), 1.0) << t;
        }
    }
}

TEST(BinomialCp, ZeroAtImpossibleParameter) {
    EXPECT_EQ(binomial_cp_contour({25, 17})(0.0), 0.0);
    EXPECT_EQ(binomial_cp_contour({25, 17})(1.0), 0.0);
}

TEST(BinomialCp, HalfMatchesDirectCdf) {
    const double v = 2.0 * std::min({dist::binomial_cdf(25, 0.5, 17), 1.0 - dist::binomial_cdf(25, 0.5, 16), 0.5});
    EXPECT_DOUBLE_EQ(binomial_cp_contour({25, 17})(0.5), v);
}

TEST(BinomialIm, EqualsBlakerOracle) {
    double worst = 0.0;
    for (int x : {0, 3, 12, 17, 25})
        for (int i = 0; i <= 1000; ++i) {
            const double t = i / 1000.0;
            worst = std::max(worst, std::abs(binomial_im_value(25, x, t) - oracle::blaker_acceptability(25, x, t)));
        }
    EXPECT_LE(worst, 1e-10);
}

TEST(BinomialIm, PlateauIsOne) {
    EXPECT_EQ(binomial_im_contour({25, 17})(0.68), 1.0);
}

TEST(BinomialIm, NeverAboveClopperPearson) {
    for (int i = 0; i <= 1000; ++i) {
        const double t = i / 1000.0;
        EXPECT_LE(binomial_im_value(25, 17, t), binomial_cp_index(25, 17, t) * (1.0 + 1e-9) + 1e-15) << t;
    }
}

TEST(BinomialIm, RegionInsideClopperPearson) {
    const auto im = plausibility_region(binomial_im_contour({25, 17}), 0.05);
    const auto cp = plausibility_region(binomial_cp_contour({25, 17}), 0.05);
    ASSERT_EQ(im.intervals.size(), 1u);
    ASSERT_EQ(cp.intervals.size(), 1u);
    EXPECT_GE(im.intervals[0].first, cp.intervals[0].first);
    EXPECT_LE(im.intervals[0].second, cp.intervals[0].second);
}

TEST(BinomialIm, RegionEndpointsMatchBlakerInterval) {
    const auto im = plausibility_region(binomial_im_contour({25, 17}), 0.05);
    ASSERT_EQ(im.intervals.size(), 1u);
    // Oracle endpoints by a fine scan of the acceptability function.
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i <= 100000; ++i) {
        const double t = i / 100000.0;
        if (oracle::blaker_acceptability(25, 17, t) > 0.05) {
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    }
    EXPECT_NEAR(im.intervals[0].first, lo, 1.5e-5);
    EXPECT_NEAR(im.intervals[0].second, hi, 1.5e-5);
}

TEST(BinomialIm, BoundaryParameters) {
    EXPECT_EQ(binomial_im_value(25, 0, 0.0), 1.0);
    EXPECT_EQ(binomial_im_value(25, 3, 0.0), 0.0);
    EXPECT_EQ(binomial_im_value(25, 25, 1.0), 1.0);
    EXPECT_EQ(binomial_im_value(25, 24, 1.0), 0.0);
}
