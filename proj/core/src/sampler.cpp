#include "ttf/sampler.hpp"

#include <cmath>

namespace ttf {

namespace {

// Shared draw sequence: r, first kind, then one dwell per running event.
template <typename Sink>
void draw_epoch(const ParamSet& theta, Rng& rng, Sink&& sink)
{
    const std::int64_t r = 1 + rng.poisson(theta.mu);
    EventType kind = rng.bernoulli(theta.p) ? EventType::RunOk : EventType::RunAlert;
    sink.begin(r, kind);
    for (std::int64_t j = 0; j < r; ++j) {
        const double rate = kind == EventType::RunOk ? theta.lambda1 : theta.lambda2;
        sink.event(kind, rng.exponential(rate));
        kind = opposite(kind);
    }
}

struct EpochSink {
    Epoch& epoch;
    void begin(std::int64_t r, EventType) { epoch.events.reserve(static_cast<std::size_t>(r) + 1); }
    void event(EventType kind, double duration) { epoch.events.push_back({kind, duration, {}}); }
};

struct StatsSink {
    SufficientStats& stats;
    void begin(std::int64_t r, EventType first)
    {
        const bool odd = r % 2 == 1;
        const Situation s = first == EventType::RunOk ? (odd ? Situation::S1 : Situation::S2)
                                                      : (odd ? Situation::S3 : Situation::S4);
        const int ri = static_cast<int>(r);
        const auto counts = implied_counts(s, ri);
        ++stats.epochs;
        ++stats.situations[static_cast<int>(s) - 1];
        stats.count_ok += counts[0];
        stats.count_alert += counts[1];
        stats.extra_events += r - 1;
        stats.log_factorials += std::lgamma(static_cast<double>(r));
    }
    void event(EventType kind, double duration)
    {
        if (kind == EventType::RunOk)
            stats.duration_ok += duration;
        else
            stats.duration_alert += duration;
    }
};

} // namespace

Epoch sample_epoch(const ParamSet& theta, Rng& rng, std::int64_t id)
{
    Epoch epoch;
    epoch.id = id;
    draw_epoch(theta, rng, EpochSink{epoch});
    epoch.events.push_back({EventType::Fail, 0.0, {}});
    return epoch;
}

Dataset generate_dataset(const ParamSet& theta, int n, Rng& rng)
{
    check_domain(theta);
    if (n < 1)
        throw Error(ErrorKind::InvalidArgument, "need at least one epoch");
    Dataset data;
    data.epochs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        data.epochs.push_back(sample_epoch(theta, rng, i + 1));
    return data;
}

Dataset generate_dataset(const ParamSet& theta, int n, std::uint64_t seed)
{
    Rng rng(seed);
    return generate_dataset(theta, n, rng);
}

SufficientStats sample_stats(const ParamSet& theta, int n, Rng& rng)
{
    check_domain(theta);
    if (n < 1)
        throw Error(ErrorKind::InvalidArgument, "need at least one epoch");
    SufficientStats stats;
    for (int i = 0; i < n; ++i)
        draw_epoch(theta, rng, StatsSink{stats});
    return stats;
}

} // namespace ttf
