#include <gtest/gtest.h>

#include <cmath>

#include "imkit/contour.hpp"
#include "imkit/models/behrens_fisher.hpp"
#include "imkit/special.hpp"

using namespace imkit;
using namespace imkit::models;

namespace {
const BehrensFisherSetup kData = BehrensFisherSetup::travel_times();
}

TEST(BehrensFisherSetup, Validation) {
    BehrensFisherSetup s = kData;
    EXPECT_NO_THROW(s.validate());
    s.v1 = 0.0;
    EXPECT_THROW(s.validate(), ConfigError);
    s = kData;
    s.n2 = 1;
    EXPECT_THROW(s.validate(), ConfigError);
    s = kData;
    s.lambda_grid = {0.5, 1.2};
    EXPECT_THROW(s.validate(), ConfigError);
}

TEST(BehrensFisherSetup, DefaultGridHas41EquispacedPoints) {
    ASSERT_EQ(kData.lambda_grid.size(), 41u);
    EXPECT_EQ(kData.lambda_grid.front(), 0.0);
    EXPECT_EQ(kData.lambda_grid.back(), 1.0);
    EXPECT_NEAR(kData.lambda_grid[1], 0.025, 1e-15);
}

TEST(BehrensFisher, LambdaFormula) {
    // λ = {1 + (n₁σ₂²)/(n₂σ₁²)}⁻¹: the weight of σ₁²/n₁ in σ₁²/n₁ + σ₂²/n₂.
    const double l = bf_lambda(5, 11, 2.0, 0.4);
    EXPECT_NEAR(l, (2.0 / 5) / (2.0 / 5 + 0.4 / 11), 1e-15);
    const ParameterPoint th = bf_theta_for(5, 11, 0.0, 0.3);
    EXPECT_NEAR(bf_lambda(5, 11, th[1], th[2]), 0.3, 1e-15);
}

TEST(BehrensFisher, HsContourAtObservedDifferenceIsOne) {
    EXPECT_EQ(bf_hs_contour(kData)(kData.d()), 1.0);
}

TEST(BehrensFisher, HsRegionIsTInterval) {
    const auto r = plausibility_region(bf_hs_contour(kData), 0.05);
    ASSERT_EQ(r.intervals.size(), 1u);
    const double t = dist::student_t_quantile(4.0, 0.975);
    const double f = std::sqrt(2.237 / 5 + 0.073 / 11);
    EXPECT_NEAR(r.intervals[0].first, 1.444 - t * f, 1e-8);
    EXPECT_NEAR(r.intervals[0].second, 1.444 + t * f, 1e-8);
}

TEST(BehrensFisher, LevelAtLambdaOneIsHsExactly) {
    // With n₁ = min(n₁, n₂), λ = 1 makes u₁/√u₂₁ a t variable with n₁ − 1 df,
    // so the level is uniform and the λ = 1 contour equals H–S.
    const RandomSetLaw law = bf_random_set(5, 11);
    const ParameterPoint th = bf_theta_for(5, 11, 0.0, 1.0);
    EXPECT_NEAR(law.focal.level(th, {1.3, 0.8, 5.0}), two_sided_t(4.0, 1.3 / std::sqrt(0.8)), 1e-15);
    const auto im = bf_im(kData, {20000, 3});
    for (double phi : {0.0, 0.8, 2.5, 4.0}) {
        const McEstimate e = im.lambda_value(phi, 1.0);
        const double hs = bf_hs_contour(kData)(phi);
        EXPECT_NEAR(e.value, hs, 4.0 * e.std_error + 1e-9) << phi;
    }
}

TEST(BehrensFisher, LambdaContoursBelowHs) {
    const auto im = bf_im(kData, {10000, 3});
    const Contour hs = bf_hs_contour(kData);
    for (double lam : {0.0, 0.25, 0.5, 0.75})
        for (double phi = -1.0; phi <= 4.0; phi += 0.5) {
            const McEstimate e = im.lambda_value(phi, lam);
            EXPECT_LE(e.value, hs(phi) + 3.0 * e.std_error + 1e-12) << lam << " " << phi;
        }
}

TEST(BehrensFisher, MarginalMatchesHs) {
    const auto im = bf_im(kData, {10000, 4});
    const Contour hs = bf_hs_contour(kData);
    for (double phi = -1.0; phi <= 4.0; phi += 0.25) {
        const McEstimate e = im.marginal_value(phi);
        EXPECT_NEAR(e.value, hs(phi), 3.0 * e.std_error + 1e-9) << phi;
    }
}

TEST(BehrensFisher, InvarianceKeySharesTables) {
    const RandomSetLaw law = bf_random_set(5, 11);
    const auto k1 = law.focal.invariance_key(ParameterPoint{0.0, 5.0 * 0.4, 11.0 * 0.6});
    const auto k2 = law.focal.invariance_key(ParameterPoint{3.0, 10.0 * 0.4, 22.0 * 0.6});
    ASSERT_EQ(k1.size(), 1u);
    EXPECT_NEAR(k1[0], k2[0], 1e-15);
}
