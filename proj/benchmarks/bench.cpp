#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "ttf/estimate.hpp"
#include "ttf/glm.hpp"
#include "ttf/predict.hpp"
#include "ttf/sampler.hpp"

namespace {

const ttf::ParamSet kTheta{0.03, 0.08, 70.0, 0.7};

void BM_FitMle(benchmark::State& state)
{
    const auto data = ttf::generate_dataset(kTheta, static_cast<int>(state.range(0)), 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(ttf::fit_mle(data));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitMle)->Arg(50)->Arg(1000);

void BM_SampleStats(benchmark::State& state)
{
    ttf::Rng rng(2);
    for (auto _ : state)
        benchmark::DoNotOptimize(ttf::sample_stats(kTheta, static_cast<int>(state.range(0)), rng));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleStats)->Arg(50)->Arg(150);

void BM_Bootstrap(benchmark::State& state)
{
    const auto fit = ttf::fit_mle(ttf::generate_dataset(kTheta, 50, 3));
    for (auto _ : state)
        benchmark::DoNotOptimize(ttf::bootstrap_ci(fit, 50, static_cast<int>(state.range(0)), 0.05, 4));
}
BENCHMARK(BM_Bootstrap)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

ttf::Dataset sensor_data(int epochs)
{
    auto data = ttf::generate_dataset(kTheta, epochs, 5);
    data.sensor_names = {"a", "b", "c", "d"};
    std::mt19937_64 gen(5);
    std::normal_distribution<double> n;
    for (auto& e : data.epochs)
        for (auto& ev : e.events)
            ev.sensors = {n(gen), n(gen), n(gen), n(gen)};
    return data;
}

void BM_FitGlm(benchmark::State& state)
{
    const auto data = sensor_data(static_cast<int>(state.range(0)));
    const auto x = ttf::epoch_covariates(data, ttf::GlmTarget::Mu);
    for (auto _ : state)
        benchmark::DoNotOptimize(ttf::fit_glm(data, x, ttf::GlmTarget::Mu, 0.7));
}
BENCHMARK(BM_FitGlm)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_ForwardSelect(benchmark::State& state)
{
    const auto data = sensor_data(400);
    const auto x = ttf::epoch_covariates(data, ttf::GlmTarget::Lambda1);
    for (auto _ : state)
        benchmark::DoNotOptimize(ttf::forward_select(data, x, ttf::GlmTarget::Lambda1, 0.7));
}
BENCHMARK(BM_ForwardSelect)->Unit(benchmark::kMillisecond);

void BM_ExpectedTimeToFail(benchmark::State& state)
{
    double mu = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ttf::expected_time_to_fail(0.03, 0.08, mu, 0.7));
        mu = std::fmod(mu + 0.37, 150.0);
    }
}
BENCHMARK(BM_ExpectedTimeToFail);

} // namespace
BENCHMARK_MAIN();
