#include <gtest/gtest.h>

#include <algorithm>

#include "ttf/estimate.hpp"
#include "ttf/sampler.hpp"

using namespace ttf;

namespace {
const ParamSet kTheta1{0.03, 0.08, 70.0, 0.7};
}

TEST(Percentiles, Positions)
{
    // floor(2 * 0.975) = 1: with two replicates both endpoints sit on the smaller one.
    EXPECT_EQ(percentile_positions(2, 0.05), (std::pair<std::size_t, std::size_t>{1, 1}));
    EXPECT_EQ(percentile_positions(2, 0.5), (std::pair<std::size_t, std::size_t>{1, 1}));
    EXPECT_EQ(percentile_positions(2000, 0.05), (std::pair<std::size_t, std::size_t>{50, 1950}));
    EXPECT_EQ(percentile_positions(100, 0.10), (std::pair<std::size_t, std::size_t>{5, 95}));
    EXPECT_EQ(percentile_positions(10, 0.05), (std::pair<std::size_t, std::size_t>{1, 9}));
}

TEST(Bootstrap, OrderStatisticsOfReplicates)
{
    const auto fit = fit_mle(generate_dataset(kTheta1, 30, 8));
    const std::uint64_t seed = 99;
    const auto boot = bootstrap_ci(fit, 30, 40, 0.05, seed);

    // Replicate m draws from Rng(seed, m + 1).
    std::vector<FitResult> reps;
    for (int m = 0; m < 40; ++m) {
        Rng rng(seed, m + 1);
        reps.push_back(fit_mle(generate_dataset(fit.params(), 30, rng)));
    }
    // Positions 1 and 39 of 40: the minimum and the second largest.
    for (Param p : kAllParams) {
        std::vector<double> v;
        for (const auto& r : reps)
            v.push_back(*r.estimate(p));
        std::sort(v.begin(), v.end());
        EXPECT_EQ(boot.intervals[index(p)]->lower, v[0]);
        EXPECT_EQ(boot.intervals[index(p)]->upper, v[38]);
    }
}

TEST(Bootstrap, ContainsPointEstimate)
{
    int contained = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const auto fit = fit_mle(generate_dataset(kTheta1, 50, seed));
        const auto boot = bootstrap_ci(fit, 50, 200, 0.05, seed + 7);
        for (Param p : kAllParams) {
            ++total;
            contained += boot.intervals[index(p)]->contains(*fit.estimate(p));
        }
    }
    EXPECT_GE(contained, static_cast<int>(0.99 * total));
}

TEST(Bootstrap, IndependentOfThreadCount)
{
    const auto fit = fit_mle(generate_dataset(kTheta1, 40, 3));
    const auto one = bootstrap_ci(fit, 40, 300, 0.05, 5, 1);
    const auto many = bootstrap_ci(fit, 40, 300, 0.05, 5, 4);
    for (Param p : kAllParams) {
        EXPECT_EQ(one.intervals[index(p)]->lower, many.intervals[index(p)]->lower);
        EXPECT_EQ(one.intervals[index(p)]->upper, many.intervals[index(p)]->upper);
    }
}

TEST(Bootstrap, AbsentRateIsSkipped)
{
    Dataset d{{Epoch{1, {{EventType::RunOk, 2.0, {}}, {EventType::Fail, 0.0, {}}}}}, {}};
    const auto boot = bootstrap_ci(fit_mle(d), 1, 20, 0.05, 1);
    EXPECT_FALSE(boot.intervals[index(Param::Lambda2)].has_value());
    EXPECT_EQ(boot.skipped[index(Param::Lambda2)], 20);
    EXPECT_EQ(boot.intervals[index(Param::P)]->lower, 1.0);
    EXPECT_EQ(boot.intervals[index(Param::Mu)]->upper, 0.0);
}

TEST(Bootstrap, RejectsBadArguments)
{
    const auto fit = fit_mle(generate_dataset(kTheta1, 10, 3));
    EXPECT_THROW(bootstrap_ci(fit, 10, 1, 0.05, 1), Error);
    EXPECT_THROW(bootstrap_ci(fit, 0, 10, 0.05, 1), Error);
    EXPECT_THROW(bootstrap_ci(fit, 10, 10, 1.5, 1), Error);
}
