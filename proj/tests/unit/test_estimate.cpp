#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "ttf/estimate.hpp"
#include "ttf/sampler.hpp"

using namespace ttf;

namespace {

const ParamSet kThetas[] = {{0.03, 0.08, 70.0, 0.7}, {0.03, 0.03, 68.0, 0.67}, {0.03, 0.02, 72.0, 0.73}};

Dataset one_epoch(EventType kind, double duration)
{
    return {{Epoch{1, {{kind, duration, {}}, {EventType::Fail, 0.0, {}}}}}, {}};
}

double rel(double a, double b)
{
    return std::fabs(a - b) / std::max(std::fabs(b), 1e-300);
}

} // namespace

TEST(LogLikelihood, HandEvaluatedSingleEpochs)
{
    const ParamSet theta{0.5, 1.0, 1.0, 0.5};
    EXPECT_NEAR(log_likelihood(theta, one_epoch(EventType::RunOk, 2.0)), -1.0 + 2 * std::log(0.5) - 1.0, 1e-12);
    EXPECT_NEAR(log_likelihood(theta, one_epoch(EventType::RunOk, 2.0)), -3.3863, 5e-5);
    EXPECT_NEAR(log_likelihood(theta, one_epoch(EventType::RunAlert, 1.0)), -2.6931, 5e-5);
}

TEST(LogLikelihood, MatchesDensitySum)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed)
        for (const auto& theta : kThetas) {
            const auto d = generate_dataset(theta, 20, seed);
            const ParamSet probe{theta.lambda1 * 1.1, theta.lambda2 * 0.9, theta.mu + 1.5, 0.6};
            EXPECT_LT(rel(log_likelihood(probe, d), oracle::density_loglik(probe, d)), 1e-10);
        }
}

TEST(LogLikelihood, BoundaryDomainErrors)
{
    Dataset d{{Epoch{1, {{EventType::RunAlert, 1.0, {}}, {EventType::RunOk, 1.0, {}}, {EventType::Fail, 0.0, {}}}}}, {}};
    EXPECT_THROW(log_likelihood({1.0, 1.0, 1.0, 1.0}, d), Error);      // ln(1 - p) with an alert-first epoch
    EXPECT_THROW(log_likelihood({1.0, 1.0, 0.0, 0.5}, d), Error);      // mu = 0 with r = 2
    EXPECT_TRUE(std::isfinite(log_likelihood({1.0, 1.0, 0.0, 1.0}, one_epoch(EventType::RunOk, 1.0))));
    EXPECT_THROW(log_likelihood({-1.0, 1.0, 1.0, 0.5}, d), Error);
}

TEST(LogLikelihood, SkipsCensoredEpoch)
{
    auto d = generate_dataset(kThetas[0], 5, 1);
    const double full = log_likelihood(kThetas[0], d);
    d.epochs.push_back(Epoch{99, {{EventType::RunOk, 3.0, {}}}});
    EXPECT_EQ(log_likelihood(kThetas[0], d), full);
}

TEST(FitMle, Table1Fixture)
{
    const auto fit = fit_mle(oracle::table1_dataset());
    EXPECT_EQ(fit.stats.count_ok, 1606);
    EXPECT_EQ(fit.stats.count_alert, 1584);
    EXPECT_EQ(fit.partition.starts_ok(), 35);
    EXPECT_NEAR(*fit.lambda1, 0.0261, 1e-12);
    EXPECT_NEAR(*fit.lambda2, 0.0738, 1e-12);
    EXPECT_NEAR(fit.p, 0.7778, 5e-5);
    EXPECT_NEAR(fit.mu, 69.8889, 5e-5);
    EXPECT_NEAR(fit.mu, 3145.0 / 45.0, 1e-12);
}

TEST(FitMle, SingleEpoch)
{
    const auto fit = fit_mle(one_epoch(EventType::RunOk, 2.0));
    EXPECT_DOUBLE_EQ(*fit.lambda1, 0.5);
    EXPECT_FALSE(fit.lambda2.has_value());
    EXPECT_EQ(fit.mu, 0.0);
    EXPECT_EQ(fit.p, 1.0);
    EXPECT_THROW(fit.params(), Error);
}

TEST(FitMle, LoglikAgreesWithLogLikelihood)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto d = generate_dataset(kThetas[seed % 3], 30, seed);
        const auto fit = fit_mle(d);
        EXPECT_LT(rel(fit.loglik, log_likelihood(fit.params(), d)), 1e-12);
    }
}

TEST(FitMle, MatchesNumericalMaximizer)
{
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const auto& theta = kThetas[seed % 3];
        const auto d = generate_dataset(theta, 10, 1000 + seed);
        const auto fit = fit_mle(d);
        const ParamSet start{theta.lambda1 * 1.3, theta.lambda2 * 0.7, theta.mu * 1.1,
                             std::clamp(fit.p * 0.8, 0.05, 0.95)};
        const auto num = oracle::maximize_base_loglik(d, start);
        EXPECT_LT(rel(num.lambda1, *fit.lambda1), 1e-6) << seed;
        EXPECT_LT(rel(num.lambda2, *fit.lambda2), 1e-6) << seed;
        EXPECT_LT(rel(num.mu, fit.mu), 1e-6) << seed;
        EXPECT_LT(rel(num.p, fit.p), 1e-6) << seed;
    }
}

TEST(Information, Table1Arithmetic)
{
    const auto fit = fit_mle(oracle::table1_dataset());
    const double i1 = *fit.fisher.value[index(Param::Lambda1)];
    EXPECT_NEAR(i1, 1606 / (0.0261 * 0.0261), 1e-3);
    EXPECT_NEAR(i1 / 1e6, 2.358, 5e-4);
    EXPECT_NEAR(1 / std::sqrt(i1), 6.512e-4, 5e-7);
    EXPECT_NEAR(*fit.fisher.value[index(Param::P)], 260.4, 0.1);
    EXPECT_NEAR(*fit.fisher.value[index(Param::Mu)], 45.0 / fit.mu, 1e-12);
}

TEST(Information, MatchesFiniteDifferenceCurvature)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto d = generate_dataset(kThetas[seed % 3], 40, 50 + seed);
        const auto fit = fit_mle(d);
        const ParamSet at = fit.params();
        for (Param which : kAllParams) {
            const auto f = [&](double v) {
                ParamSet t = at;
                switch (which) {
                case Param::Lambda1: t.lambda1 = v; break;
                case Param::Lambda2: t.lambda2 = v; break;
                case Param::P: t.p = v; break;
                case Param::Mu: t.mu = v; break;
                }
                return oracle::density_loglik(t, d);
            };
            const double x = value_of(at, which);
            const double fd = -oracle::second_difference(f, x, x * 1e-4);
            EXPECT_LT(rel(*fit.fisher.value[index(which)], fd), 1e-4) << to_string(which) << " seed " << seed;
        }
    }
}

TEST(Information, PrintedSwitch)
{
    const auto d = oracle::table1_dataset();
    const auto fit = fit_mle(d, MuInformation::Printed);
    EXPECT_NEAR(*fit.fisher.value[index(Param::Mu)], 45.0 / std::pow(fit.mu + 1.0, 2), 1e-12);
    const auto ci = asymptotic_ci(fit, 0.05, MuInformation::Printed);
    const double half = normal_critical(0.05) * (fit.mu + 1.0) / std::sqrt(45.0);
    EXPECT_NEAR(ci[index(Param::Mu)]->lower, fit.mu - half, 1e-9);
}

TEST(Information, BoundaryIsUndefined)
{
    const auto fit = fit_mle(one_epoch(EventType::RunOk, 2.0));
    EXPECT_FALSE(fit.fisher.value[index(Param::P)].has_value());
    EXPECT_FALSE(fit.fisher.value[index(Param::Mu)].has_value());
    EXPECT_FALSE(fit.fisher.value[index(Param::Lambda2)].has_value());
    EXPECT_FALSE(fit.fisher.warnings.empty());

    const auto ci = asymptotic_ci(fit, 0.05);
    ASSERT_TRUE(ci[index(Param::P)].has_value());
    EXPECT_TRUE(ci[index(Param::P)]->degenerate);
    EXPECT_EQ(ci[index(Param::P)]->lower, 1.0);
    EXPECT_EQ(ci[index(Param::P)]->upper, 1.0);
    EXPECT_FALSE(ci[index(Param::Lambda2)].has_value());
}

TEST(AsymptoticCi, Table1Endpoints)
{
    const auto fit = fit_mle(oracle::table1_dataset());
    const auto ci = asymptotic_ci(fit, 0.05);
    const auto near4 = [](double x, double target) { return std::fabs(x - target) <= 0.0002; };
    EXPECT_TRUE(near4(ci[index(Param::Lambda1)]->lower, 0.0248));
    EXPECT_TRUE(near4(ci[index(Param::Lambda1)]->upper, 0.0274));
    EXPECT_TRUE(near4(ci[index(Param::P)]->lower, 0.6563));
    EXPECT_TRUE(near4(ci[index(Param::P)]->upper, 0.8992));
    // lambda2 from the same formula: 0.0738 -+ 1.96 * 0.0738 / sqrt(1584)
    EXPECT_NEAR(ci[index(Param::Lambda2)]->lower, 0.0738 * (1 - normal_critical(0.05) / std::sqrt(1584.0)), 1e-12);
    EXPECT_NEAR(ci[index(Param::Lambda2)]->upper, 0.0774, 0.0001);
    EXPECT_NEAR(ci[index(Param::Mu)]->lower, 67.446, 0.001);
    EXPECT_NEAR(ci[index(Param::Mu)]->upper, 72.332, 0.001);
}

TEST(AsymptoticCi, WiderAlphaNarrowsEveryInterval)
{
    const auto fit = fit_mle(generate_dataset(kThetas[0], 50, 4));
    const auto wide = asymptotic_ci(fit, 0.05);
    const auto narrow = asymptotic_ci(fit, 0.5);
    for (Param p : kAllParams) {
        EXPECT_GT(narrow[index(p)]->lower, wide[index(p)]->lower);
        EXPECT_LT(narrow[index(p)]->upper, wide[index(p)]->upper);
        EXPECT_TRUE(narrow[index(p)]->contains(*fit.estimate(p)));
    }
}

TEST(AsymptoticCi, ClampedToDomain)
{
    // Few epochs and p near 1: the raw interval would cross 1.
    Dataset d;
    for (int i = 0; i < 5; ++i)
        d.epochs.push_back(Epoch{i + 1, {{EventType::RunOk, 1.0, {}}, {EventType::RunAlert, 1.0, {}}, {EventType::Fail, 0.0, {}}}});
    d.epochs.push_back(Epoch{6, {{EventType::RunAlert, 1.0, {}}, {EventType::RunOk, 1.0, {}}, {EventType::Fail, 0.0, {}}}});
    const auto ci = asymptotic_ci(fit_mle(d), 0.05);
    EXPECT_LE(ci[index(Param::P)]->upper, 1.0);
    EXPECT_GE(ci[index(Param::Lambda1)]->lower, 0.0);
}

TEST(NormalCritical, KnownQuantiles)
{
    EXPECT_NEAR(normal_critical(0.05), 1.959963984540054, 1e-12);
    EXPECT_NEAR(normal_critical(0.10), 1.6448536269514722, 1e-12);
    EXPECT_THROW(normal_critical(0.0), Error);
}
