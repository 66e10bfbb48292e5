#include <gtest/gtest.h>

#include <cmath>

#include "imkit/association.hpp"
#include "imkit/diagnostics.hpp"
#include "imkit/special.hpp"

using namespace imkit;

namespace {

const AssociationKind kAllKinds[] = {AssociationKind::normal_location, AssociationKind::binomial_quantile,
                                     AssociationKind::uniform_min_max, AssociationKind::iid_quantile,
                                     AssociationKind::behrens_fisher,  AssociationKind::noncentral_chisq,
                                     AssociationKind::split_normal};

ParameterPoint theta_for(AssociationKind k) {
    switch (k) {
        case AssociationKind::binomial_quantile: return ParameterPoint{0.68};
        case AssociationKind::iid_quantile: return ParameterPoint(normal_distribution_handle(1.0, 2.0));
        case AssociationKind::behrens_fisher: return ParameterPoint{0.7, 2.0, 0.5};
        case AssociationKind::noncentral_chisq: return ParameterPoint{2.5};
        default: return ParameterPoint{0.3};
    }
}

Association make(AssociationKind k) {
    return builtin_association(k, {.n = 25, .n1 = 5, .n2 = 11, .df = 3.0});
}

}  // namespace

TEST(Association, KindNamesRoundTrip) {
    for (auto k : kAllKinds) EXPECT_EQ(association_kind_from_string(to_string(k)), k);
    EXPECT_THROW(association_kind_from_string("nope"), ConfigError);
}

TEST(Association, InvalidParametersRejected) {
    EXPECT_THROW(builtin_association(AssociationKind::normal_location, {.n = 0}), ConfigError);
    EXPECT_THROW(builtin_association(AssociationKind::behrens_fisher, {.n1 = 1, .n2 = 5}), ConfigError);
    EXPECT_THROW(builtin_association(AssociationKind::noncentral_chisq, {.df = 0.5}), ConfigError);
    EXPECT_THROW(builtin_association(AssociationKind::split_normal, {.n1 = 0, .n2 = 3}), ConfigError);
}

TEST(Association, BinomialForwardInvertsCdf) {
    const Association a = make(AssociationKind::binomial_quantile);
    EXPECT_EQ(a.forward(ParameterPoint{0.5}, {0.5})[0], 12.0);
    EXPECT_LT(dist::binomial_cdf(25, 0.5, 11), 0.5);
    EXPECT_GE(dist::binomial_cdf(25, 0.5, 12), 0.5);
}

TEST(Association, NormalLocationZeroNoise) {
    const Association a = builtin_association(AssociationKind::normal_location, {.n = 2});
    EXPECT_EQ(a.forward(ParameterPoint{0.0}, {0.0, 0.0}), (Sample{0.0, 0.0}));
}

TEST(Association, UniformMinMaxAddsTheta) {
    const Association a = builtin_association(AssociationKind::uniform_min_max, {.n = 4});
    EXPECT_EQ(a.forward(ParameterPoint{2.0}, {0.1, 0.7}), (Sample{2.1, 2.7}));
}

TEST(Association, RoundTripOnSampledPoints) {
    for (auto k : kAllKinds) {
        const Association a = make(k);
        const ParameterPoint th = theta_for(k);
        RngStream rng(11, static_cast<std::uint64_t>(k));
        for (int i = 0; i < 50; ++i) {
            const Sample u = a.sample_u(rng);
            ASSERT_EQ(u.size(), a.dim_u) << to_string(k);
            EXPECT_TRUE(a.in_u_fiber(a.forward(th, u), th, u)) << to_string(k);
        }
    }
}

TEST(Association, SameSeedSameTrajectories) {
    for (auto k : kAllKinds) {
        const Association a = make(k);
        RngStream r1(3, 1), r2(3, 1);
        for (int i = 0; i < 10; ++i)
            EXPECT_EQ(a.forward(theta_for(k), a.sample_u(r1)), a.forward(theta_for(k), a.sample_u(r2)));
    }
}

TEST(Association, ConsistencyNormalMeanNearZero) {
    const Association a = builtin_association(AssociationKind::normal_location, {.n = 1});
    const auto rep = check_model_consistency(a, ParameterPoint{0.0}, 100000, 5);
    EXPECT_TRUE(rep.ok);
    EXPECT_NEAR(rep.rows[0].mean, 0.0, 4.0 / std::sqrt(1e5));
}

TEST(Association, ConsistencyBinomialMean) {
    const auto rep = check_model_consistency(make(AssociationKind::binomial_quantile), ParameterPoint{0.68}, 100000, 5);
    EXPECT_TRUE(rep.ok);
    EXPECT_NEAR(rep.rows[0].mean, 0.68, 4.0 * std::sqrt(0.68 * 0.32 / 25.0 / 1e5));
}

TEST(Association, ConsistencyBehrensFisherScaledVariances) {
    const auto rep = check_model_consistency(make(AssociationKind::behrens_fisher), ParameterPoint{0.7, 2.0, 0.5},
                                             50000, 5);
    EXPECT_TRUE(rep.ok);
    EXPECT_NEAR(rep.rows[1].mean, 1.0, 0.03);
    EXPECT_NEAR(rep.rows[2].mean, 1.0, 0.03);
}

TEST(Association, ConsistencyEveryKind) {
    for (auto k : kAllKinds) {
        const auto rep = check_model_consistency(make(k), theta_for(k), 20000, 17);
        EXPECT_TRUE(rep.ok) << to_string(k);
        EXPECT_FALSE(rep.rows.empty()) << to_string(k);
    }
}

TEST(Association, ConsistencyFlagsWrongModel) {
    Association a = builtin_association(AssociationKind::normal_location, {.n = 1});
    a.probes[0].expected = [](const ParameterPoint&) { return 0.2; };
    EXPECT_FALSE(check_model_consistency(a, ParameterPoint{0.0}, 20000, 5).ok);
}

TEST(Association, NoncentralFiberEmptyExactlyAboveCentralCdf) {
    const Association a = make(AssociationKind::noncentral_chisq);
    const double x = 2.0, f0 = dist::chisq_cdf(3.0, x);
    EXPECT_TRUE(a.theta_fiber_nonempty({x}, {f0 * 0.99}));
    EXPECT_TRUE(a.theta_fiber_nonempty({x}, {f0}));
    EXPECT_FALSE(a.theta_fiber_nonempty({x}, {f0 + 1e-6}));
}
