#include <gtest/gtest.h>

#include <random>

#include "maxcorr/core_stats.hpp"
#include "oracles.hpp"

using namespace maxcorr;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

Eigen::VectorXd normal_series(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    Eigen::VectorXd x(n);
    for (Index i = 0; i < n; ++i) x(i) = d(rng);
    return x;
}

}  // namespace

TEST(Autocovariance, HandValues) {
    EXPECT_EQ(sample_autocovariance(vec({0, 0, 0, 0}), 1), 0.0);
    EXPECT_DOUBLE_EQ(sample_autocovariance(vec({1, -1, 2, -2}), 0), 2.5);
    EXPECT_DOUBLE_EQ(sample_autocovariance(vec({1, -1, 2, -2}), 1), -1.75);
}

TEST(Autocovariance, RejectsBadLagAndNonFinite) {
    EXPECT_THROW(sample_autocovariance(vec({1, 2, 3}), 3), InvalidArgument);
    EXPECT_THROW(sample_autocovariance(vec({1, 2, 3}), -1), InvalidArgument);
    EXPECT_THROW(sample_autocovariance(vec({1, std::nan(""), 3}), 1), InvalidArgument);
}

TEST(Autocovariance, MatchesDirectSummationOracle) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Index n = 20 + static_cast<Index>(seed) * 7;
        const Eigen::VectorXd e = normal_series(n, seed);
        const auto e1 = oracle::one_based(e.data(), static_cast<int>(n));
        for (Index h = 0; h < n; h += 3) {
            const double want = oracle::autocov(e1, static_cast<int>(h));
            const double scale = std::max(std::abs(want), oracle::autocov_scale(e1, static_cast<int>(h)));
            EXPECT_LE(std::abs(sample_autocovariance(e, h) - want), 1e-12 * scale);
        }
    }
}

TEST(Autocovariance, ReversedSeriesMatchesMirroredProducts) {
    const Eigen::VectorXd e = normal_series(40, 3);
    const Eigen::VectorXd r = e.reverse();
    EXPECT_NEAR(sample_autocovariance(r, 0), sample_autocovariance(e, 0), 1e-14);
    const auto r1 = oracle::one_based(r.data(), 40);
    EXPECT_NEAR(sample_autocovariance(r, 4), oracle::autocov(r1, 4), 1e-14);
}

TEST(Autocovariance, WorksForFloatScalars) {
    Eigen::VectorXf e(4);
    e << 1.f, -1.f, 2.f, -2.f;
    EXPECT_FLOAT_EQ(sample_autocovariance(e, 1), -1.75f);
    const auto c = sample_correlations(e, 2);
    EXPECT_FLOAT_EQ(c.rho_at(1), -0.7f);
}

TEST(Correlations, AlternatingSeries) {
    const auto c = sample_correlations(vec({1, -1, 1, -1}), 1);
    EXPECT_DOUBLE_EQ(c.gamma(0), 1.0);
    EXPECT_DOUBLE_EQ(c.rho_at(1), -0.75);
    EXPECT_EQ(c.max_lag(), 1);
}

TEST(Correlations, ErrorsOnZeroLagAndDegenerateSeries) {
    EXPECT_THROW(sample_correlations(vec({1, 2, 3}), 0), InvalidArgument);
    EXPECT_THROW(sample_correlations(vec({1, 2, 3}), 3), InvalidArgument);
    EXPECT_THROW(sample_correlations(vec({0, 0, 0, 0}), 1), DegenerateSeries);
}

TEST(Correlations, WhiteNoiseIsSmall) {
    const auto c = sample_correlations(normal_series(10000, 11), 10);
    EXPECT_LT(c.rho.cwiseAbs().maxCoeff(), 0.1);
}

TEST(Correlations, ScaleInvariant) {
    const Eigen::VectorXd e = normal_series(200, 5);
    const auto a = sample_correlations(e, 8);
    const auto b = sample_correlations(Eigen::VectorXd(-3.7 * e), 8);
    EXPECT_LT((a.rho - b.rho).cwiseAbs().maxCoeff(), 1e-14);
    const auto w = resolve_weights(WeightScheme::constant, 200, 8);
    EXPECT_NEAR(max_corr_statistic(a, w), max_corr_statistic(b, w), 1e-12);
}

TEST(LagRule, Resolution) {
    EXPECT_EQ(resolve_lag_rule(LagRule::proportional(0.5), 100).lag, 10);
    EXPECT_EQ(resolve_lag_rule(LagRule::proportional(1.0), 100).lag, 21);
    EXPECT_EQ(resolve_lag_rule(LagRule::proportional(1.0), 500).lag, 80);
    EXPECT_EQ(resolve_lag_rule(LagRule::proportional(0.5), 500).lag, 40);
    EXPECT_EQ(resolve_lag_rule(LagRule::fixed(5), 1000).lag, 5);
}

TEST(LagRule, ClipsAndValidates) {
    const auto r = resolve_lag_rule(LagRule::fixed(50), 20);
    EXPECT_EQ(r.lag, 19);
    EXPECT_TRUE(r.clipped);
    EXPECT_FALSE(resolve_lag_rule(LagRule::fixed(5), 20).clipped);
    EXPECT_THROW(resolve_lag_rule(LagRule::proportional(0.5), 7), InvalidArgument);
    EXPECT_THROW(resolve_lag_rule(LagRule::proportional(1.5), 100), InvalidArgument);
    EXPECT_THROW(resolve_lag_rule(LagRule::fixed(0), 100), InvalidArgument);
}

TEST(LagRule, ParseRoundTrip) {
    EXPECT_EQ(LagRule::parse("5").fixed_lag, 5);
    EXPECT_EQ(LagRule::parse("fixed:7").fixed_lag, 7);
    const LagRule p = LagRule::parse("prop:0.5");
    EXPECT_EQ(p.kind, LagRule::Kind::proportional);
    EXPECT_DOUBLE_EQ(p.delta, 0.5);
    EXPECT_EQ(LagRule::parse(p.to_string()).delta, 0.5);
    EXPECT_THROW(LagRule::parse("prop:x"), InvalidArgument);
    EXPECT_THROW(LagRule::parse(""), InvalidArgument);
}

TEST(Weights, ConstantAndLjungBox) {
    const auto c = resolve_weights(WeightScheme::constant, 100, 5);
    EXPECT_TRUE(c.resolved.isOnes());
    const auto lb = resolve_weights(WeightScheme::ljung_box, 100, 5);
    EXPECT_DOUBLE_EQ(lb.resolved(0), 102.0 / 99.0);
    EXPECT_DOUBLE_EQ(lb.resolved(4), 102.0 / 95.0);
    EXPECT_NEAR(lb.resolved(4), 1.0737, 1e-4);
}

TEST(Weights, CustomMustBePositiveAndSized) {
    EXPECT_THROW(resolve_weights(WeightScheme::custom, 100, 3, vec({1, 2})), InvalidArgument);
    EXPECT_THROW(resolve_weights(WeightScheme::custom, 100, 2, vec({1, 0})), InvalidArgument);
    EXPECT_EQ(resolve_weights(WeightScheme::custom, 100, 2, vec({1, 2})).resolved(1), 2.0);
}

TEST(Statistics, MaxCorrHandValues) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
    EXPECT_EQ(max_corr_statistic(vec({0, 0, 0}), 100, ones), 0.0);
    EXPECT_NEAR(max_corr_statistic(vec({0.1, -0.3, 0.2}), 100, ones), 3.0, 1e-12);
}

TEST(Statistics, PortmanteauHandValues) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
    EXPECT_EQ(portmanteau_statistic(vec({0, 0}), 100, ones), 0.0);
    EXPECT_NEAR(portmanteau_statistic(vec({0.1, -0.3}), 100, ones), 10.0, 1e-12);
}

TEST(Statistics, MonotoneInLag) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto c = sample_correlations(normal_series(150, seed), 12);
        const Eigen::VectorXd w = Eigen::VectorXd::Ones(12);
        for (Index L = 1; L < 12; ++L) {
            EXPECT_LE(max_corr_statistic(c.rho.head(L), 150, w), max_corr_statistic(c.rho.head(L + 1), 150, w));
            EXPECT_LE(portmanteau_statistic(c.rho.head(L), 150, w),
                      portmanteau_statistic(c.rho.head(L + 1), 150, w));
        }
    }
}

TEST(Statistics, UnitWeightsGiveBoxPierce) {
    const auto c = sample_correlations(normal_series(80, 2), 6);
    const auto w = resolve_weights(WeightScheme::constant, 80, 6);
    EXPECT_DOUBLE_EQ(portmanteau_statistic(c, w), 80.0 * c.rho.squaredNorm());
}

TEST(Statistics, SchemeNames) {
    EXPECT_EQ(parse_weight_scheme(to_string(WeightScheme::ljung_box)), WeightScheme::ljung_box);
    EXPECT_THROW(parse_weight_scheme("bogus"), InvalidArgument);
}

TEST(SeriesType, Validation) {
    EXPECT_THROW(Series::make(vec({1})), InvalidArgument);
    EXPECT_THROW(Series::make(vec({1, INFINITY})), InvalidArgument);
    EXPECT_EQ(Series::make(vec({1, 2}), "x").size(), 2);
}
