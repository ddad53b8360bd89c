#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ttf/model.hpp"
#include "ttf/params.hpp"

namespace ttf {

/// Everything the closed-form estimators read from a dataset.
struct SufficientStats {
    int epochs = 0;
    std::array<int, 4> situations{};    // n1..n4
    std::int64_t count_ok = 0;          // N^1
    std::int64_t count_alert = 0;       // N^2
    double duration_ok = 0.0;           // total RunOk dwell
    double duration_alert = 0.0;        // total RunAlert dwell
    std::int64_t extra_events = 0;      // sum of (r_i - 1)
    double log_factorials = 0.0;        // sum of ln((r_i - 1)!)

    int starts_ok() const { return situations[0] + situations[1]; }
    int starts_alert() const { return situations[2] + situations[3]; }
    std::int64_t running_events() const { return count_ok + count_alert; }

    /// Folds one complete epoch in. Per-kind counts come from the situation
    /// identity (r + a) / 2 and are cross-checked against direct counting.
    void add(const Epoch& epoch);
};

SufficientStats sufficient_stats(const Dataset& data);

/// How the observed information for mu is computed. SecondDerivative is the
/// negative second derivative of the log-likelihood, sum(r - 1) / mu^2 = n / mu
/// at the MLE. Printed is n / (mu + 1)^2, kept only for audit comparisons.
enum class MuInformation { SecondDerivative, Printed };

struct ObservedInformation {
    /// Absent when the information is undefined (estimate on the boundary or
    /// the estimate itself is absent).
    PerParam<std::optional<double>> value;
    std::vector<std::string> warnings;
};

struct FitResult {
    /// Absent when the data hold no event of that kind.
    std::optional<double> lambda1;
    std::optional<double> lambda2;
    double mu = 0.0;
    double p = 0.0;

    ObservedInformation fisher;
    double loglik = 0.0;
    SufficientStats stats;
    SituationPartition partition;

    std::optional<double> estimate(Param p) const;
    /// Throws Error(DomainError) when either rate is absent.
    ParamSet params() const;
};

/// Full log-likelihood of the complete epochs in `data`, constants
/// -sum ln((r - 1)!) included. Zero-coefficient terms such as 0 * ln(0) are 0.
double log_likelihood(const ParamSet& theta, const Dataset& data);

/// Closed-form MLEs from sufficient statistics; partition is left empty.
FitResult fit_from_stats(const SufficientStats& stats, MuInformation mu_info = MuInformation::SecondDerivative);

/// Closed-form MLEs over the complete epochs of `data`.
FitResult fit_mle(const Dataset& data, MuInformation mu_info = MuInformation::SecondDerivative);

ObservedInformation observed_information(const FitResult& fit, MuInformation mu_info = MuInformation::SecondDerivative);

enum class CiMethod { Asymptotic, Bootstrap };

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;
    CiMethod method = CiMethod::Asymptotic;
    bool degenerate = false;    // point interval: information undefined

    bool contains(double x) const { return lower <= x && x <= upper; }
};

/// Upper alpha/2 standard normal quantile.
double normal_critical(double alpha);

/// estimate -+ z / sqrt(I), clamped to the parameter domain. Degenerate
/// information yields the point interval at the estimate, flagged.
PerParam<std::optional<ConfidenceInterval>> asymptotic_ci(const FitResult& fit, double alpha,
                                                          MuInformation mu_info = MuInformation::SecondDerivative);

struct BootstrapResult {
    PerParam<std::optional<ConfidenceInterval>> intervals;
    /// Replicates that lacked an estimate for the parameter (rates only).
    PerParam<int> skipped{};
    int replicates = 0;
};

/// 1-based order-statistic positions floor(M alpha / 2) and
/// floor(M (1 - alpha / 2)), clamped to [1, M].
std::pair<std::size_t, std::size_t> percentile_positions(std::size_t m, double alpha);

/// Parametric bootstrap: M datasets of n epochs drawn from the fitted model
/// and refit. Replicate m draws from Rng(seed, m + 1), so results are
/// identical for any thread count.
BootstrapResult bootstrap_ci(const FitResult& fit, int n, int replicates, double alpha, std::uint64_t seed,
                             unsigned threads = 1);

} // namespace ttf
