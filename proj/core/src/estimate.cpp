#include "ttf/estimate.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "ttf/parallel.hpp"
#include "ttf/random.hpp"
#include "ttf/sampler.hpp"

namespace ttf {

void check_domain(const ParamSet& theta)
{
    const bool ok = theta.lambda1 > 0.0 && std::isfinite(theta.lambda1) && theta.lambda2 > 0.0 &&
                    std::isfinite(theta.lambda2) && theta.mu >= 0.0 && std::isfinite(theta.mu) &&
                    theta.p >= 0.0 && theta.p <= 1.0;
    if (!ok)
        throw Error(ErrorKind::DomainError, "parameters outside domain: need lambda1, lambda2 > 0, mu >= 0, 0 <= p <= 1");
}

std::string_view to_string(Param p)
{
    switch (p) {
    case Param::Lambda1: return "lambda1";
    case Param::Lambda2: return "lambda2";
    case Param::P: return "p";
    case Param::Mu: return "mu";
    }
    return "?";
}

double value_of(const ParamSet& theta, Param p)
{
    switch (p) {
    case Param::Lambda1: return theta.lambda1;
    case Param::Lambda2: return theta.lambda2;
    case Param::P: return theta.p;
    case Param::Mu: return theta.mu;
    }
    return 0.0;
}

void SufficientStats::add(const Epoch& epoch)
{
    const int r = epoch.running_count();
    const Situation s = classify_epoch(epoch);
    const auto [n_ok, n_alert] = implied_counts(s, r);
    if (n_ok != epoch.count_of(EventType::RunOk) || n_alert != epoch.count_of(EventType::RunAlert))
        throw Error(ErrorKind::NonAlternating,
                    "epoch " + std::to_string(epoch.id) + ": event counts disagree with its situation");

    ++epochs;
    ++situations[static_cast<int>(s) - 1];
    count_ok += n_ok;
    count_alert += n_alert;
    extra_events += r - 1;
    log_factorials += std::lgamma(static_cast<double>(r));
    for (const auto& ev : epoch.events) {
        if (ev.kind == EventType::RunOk)
            duration_ok += ev.duration;
        else if (ev.kind == EventType::RunAlert)
            duration_alert += ev.duration;
    }
}

SufficientStats sufficient_stats(const Dataset& data)
{
    SufficientStats stats;
    for (const auto& epoch : data.epochs)
        if (!epoch.censored())
            stats.add(epoch);
    return stats;
}

namespace {

// c * ln(x) with 0 * ln(anything) = 0.
double xlogy(double c, double x)
{
    if (c == 0.0)
        return 0.0;
    if (!(x > 0.0))
        throw Error(ErrorKind::DomainError, "log-likelihood is -inf: ln(0) with a nonzero count");
    return c * std::log(x);
}

struct SituationSums {
    double epochs = 0.0;
    double extra_events = 0.0;
    double log_factorials = 0.0;
    double count_ok = 0.0;
    double duration_ok = 0.0;
    double count_alert = 0.0;
    double duration_alert = 0.0;
};

} // namespace

double log_likelihood(const ParamSet& theta, const Dataset& data)
{
    check_domain(theta);

    std::array<SituationSums, 4> sums{};
    for (const auto& epoch : data.epochs) {
        if (epoch.censored())
            continue;
        const int r = epoch.running_count();
        const Situation s = classify_epoch(epoch);
        const auto counts = implied_counts(s, r);
        auto& acc = sums[static_cast<int>(s) - 1];
        acc.epochs += 1.0;
        acc.extra_events += r - 1;
        acc.log_factorials += std::lgamma(static_cast<double>(r));
        acc.count_ok += counts[0];
        acc.count_alert += counts[1];
        acc.duration_ok += epoch.duration_of(EventType::RunOk);
        acc.duration_alert += epoch.duration_of(EventType::RunAlert);
    }

    double total = 0.0;
    for (int l = 0; l < 4; ++l) {
        const auto& a = sums[l];
        const double first_prob = l < 2 ? theta.p : 1.0 - theta.p;
        total += -a.epochs * theta.mu + xlogy(a.extra_events, theta.mu) - a.log_factorials +
                 xlogy(a.epochs, first_prob) + xlogy(a.count_ok, theta.lambda1) - theta.lambda1 * a.duration_ok +
                 xlogy(a.count_alert, theta.lambda2) - theta.lambda2 * a.duration_alert;
    }
    return total;
}

std::optional<double> FitResult::estimate(Param which) const
{
    switch (which) {
    case Param::Lambda1: return lambda1;
    case Param::Lambda2: return lambda2;
    case Param::P: return p;
    case Param::Mu: return mu;
    }
    return std::nullopt;
}

ParamSet FitResult::params() const
{
    if (!lambda1 || !lambda2)
        throw Error(ErrorKind::DomainError, "fit lacks a rate estimate: no events of one running kind");
    return {*lambda1, *lambda2, mu, p};
}

ObservedInformation observed_information(const FitResult& fit, MuInformation mu_info)
{
    ObservedInformation info;
    const auto& st = fit.stats;

    if (fit.lambda1)
        info.value[index(Param::Lambda1)] = static_cast<double>(st.count_ok) / (*fit.lambda1 * *fit.lambda1);
    if (fit.lambda2)
        info.value[index(Param::Lambda2)] = static_cast<double>(st.count_alert) / (*fit.lambda2 * *fit.lambda2);

    if (fit.p > 0.0 && fit.p < 1.0)
        info.value[index(Param::P)] =
            st.starts_ok() / (fit.p * fit.p) + st.starts_alert() / ((1.0 - fit.p) * (1.0 - fit.p));
    else
        info.warnings.emplace_back("DegenerateInfo: p estimate on the boundary; information for p undefined");

    if (mu_info == MuInformation::Printed)
        info.value[index(Param::Mu)] = st.epochs / ((fit.mu + 1.0) * (fit.mu + 1.0));
    else if (fit.mu > 0.0)
        info.value[index(Param::Mu)] = static_cast<double>(st.extra_events) / (fit.mu * fit.mu);
    else
        info.warnings.emplace_back("DegenerateInfo: mu estimate is 0; information for mu undefined");

    return info;
}

namespace {

double stats_log_likelihood(const FitResult& fit, const SufficientStats& st)
{
    // Rates absent only when their counts are zero, in which case the terms vanish.
    const double l1 = fit.lambda1.value_or(1.0);
    const double l2 = fit.lambda2.value_or(1.0);
    return -st.epochs * fit.mu + xlogy(static_cast<double>(st.extra_events), fit.mu) - st.log_factorials +
           xlogy(st.starts_ok(), fit.p) + xlogy(st.starts_alert(), 1.0 - fit.p) +
           xlogy(static_cast<double>(st.count_ok), l1) - l1 * st.duration_ok +
           xlogy(static_cast<double>(st.count_alert), l2) - l2 * st.duration_alert;
}

FitResult estimates_from(const SufficientStats& st)
{
    if (st.epochs == 0)
        throw Error(ErrorKind::InvalidArgument, "no complete epochs to estimate from");
    FitResult fit;
    fit.stats = st;
    if (st.count_ok > 0)
        fit.lambda1 = static_cast<double>(st.count_ok) / st.duration_ok;
    if (st.count_alert > 0)
        fit.lambda2 = static_cast<double>(st.count_alert) / st.duration_alert;
    fit.p = static_cast<double>(st.starts_ok()) / st.epochs;
    fit.mu = static_cast<double>(st.extra_events) / st.epochs;
    return fit;
}

} // namespace

FitResult fit_from_stats(const SufficientStats& stats, MuInformation mu_info)
{
    FitResult fit = estimates_from(stats);
    fit.fisher = observed_information(fit, mu_info);
    fit.loglik = stats_log_likelihood(fit, stats);
    fit.partition.counts = stats.situations;
    return fit;
}

FitResult fit_mle(const Dataset& data, MuInformation mu_info)
{
    FitResult fit = fit_from_stats(sufficient_stats(data), mu_info);
    fit.partition = partition(data);
    return fit;
}

double normal_critical(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
    return boost::math::quantile(boost::math::complement(boost::math::normal_distribution<double>(), alpha / 2.0));
}

namespace {

ConfidenceInterval clamp_to_domain(Param which, ConfidenceInterval ci)
{
    ci.lower = std::max(ci.lower, 0.0);
    if (which == Param::P)
        ci.upper = std::min(ci.upper, 1.0);
    return ci;
}

} // namespace

PerParam<std::optional<ConfidenceInterval>> asymptotic_ci(const FitResult& fit, double alpha, MuInformation mu_info)
{
    const double z = normal_critical(alpha);
    const ObservedInformation info = observed_information(fit, mu_info);

    PerParam<std::optional<ConfidenceInterval>> out;
    for (Param which : kAllParams) {
        const auto est = fit.estimate(which);
        if (!est)
            continue;
        ConfidenceInterval ci;
        ci.level = 1.0 - alpha;
        ci.method = CiMethod::Asymptotic;
        const auto& i = info.value[index(which)];
        if (!i || !(*i > 0.0) || !std::isfinite(*i)) {
            ci.lower = ci.upper = *est;
            ci.degenerate = true;
        } else {
            const double half = z / std::sqrt(*i);
            ci.lower = *est - half;
            ci.upper = *est + half;
        }
        out[index(which)] = clamp_to_domain(which, ci);
    }
    return out;
}

std::pair<std::size_t, std::size_t> percentile_positions(std::size_t m, double alpha)
{
    // The epsilon absorbs representation error in products such as 2000 * 0.975.
    const auto position = [m](double x) {
        const auto k = static_cast<std::size_t>(std::floor(x + 1e-9));
        return std::clamp<std::size_t>(k, 1, m);
    };
    const double md = static_cast<double>(m);
    return {position(md * alpha / 2.0), position(md * (1.0 - alpha / 2.0))};
}

BootstrapResult bootstrap_ci(const FitResult& fit, int n, int replicates, double alpha, std::uint64_t seed,
                             unsigned threads)
{
    if (replicates < 2)
        throw Error(ErrorKind::InvalidArgument, "bootstrap needs at least 2 replicates");
    if (n < 1)
        throw Error(ErrorKind::InvalidArgument, "bootstrap needs n >= 1 epochs");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");

    // An absent rate means the fitted model never produces that kind, so the
    // placeholder is never sampled.
    const ParamSet theta{fit.lambda1.value_or(1.0), fit.lambda2.value_or(1.0), fit.mu, fit.p};
    check_domain(theta);

    std::vector<PerParam<std::optional<double>>> draws(static_cast<std::size_t>(replicates));
    parallel_for(draws.size(), threads, [&](std::size_t m) {
        Rng rng(seed, m + 1);
        const FitResult refit = estimates_from(sample_stats(theta, n, rng));
        for (Param which : kAllParams)
            draws[m][index(which)] = refit.estimate(which);
    });

    BootstrapResult out;
    out.replicates = replicates;
    for (Param which : kAllParams) {
        std::vector<double> values;
        values.reserve(draws.size());
        for (const auto& d : draws) {
            if (d[index(which)])
                values.push_back(*d[index(which)]);
            else
                ++out.skipped[index(which)];
        }
        if (values.empty())
            continue;
        std::sort(values.begin(), values.end());
        const auto [lo, hi] = percentile_positions(values.size(), alpha);
        ConfidenceInterval ci;
        ci.lower = values[lo - 1];
        ci.upper = values[hi - 1];
        ci.level = 1.0 - alpha;
        ci.method = CiMethod::Bootstrap;
        out.intervals[index(which)] = ci;
    }
    return out;
}

} // namespace ttf
