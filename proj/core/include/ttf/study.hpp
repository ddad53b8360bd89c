#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "ttf/estimate.hpp"
#include "ttf/params.hpp"

namespace ttf {

struct StudyConfig {
    ParamSet theta;
    int n_epochs = 50;
    int replications = 1000;
    int bootstrap_M = 2000;     // 0 skips the bootstrap columns
    double alpha = 0.05;
    std::uint64_t seed = 0;
    unsigned threads = 0;       // 0: hardware concurrency
    MuInformation mu_info = MuInformation::SecondDerivative;
};

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

struct ParamSummary {
    double avg_bias = 0.0;      // mean |estimate - truth|
    double mse = 0.0;
    Interval avg_asymptotic;
    std::optional<Interval> avg_bootstrap;
    double coverage_asymptotic = 0.0;
    std::optional<double> coverage_bootstrap;
    int used = 0;               // replicates with an estimate
    int skipped = 0;            // replicates lacking one (zero events of a kind)
};

struct StudyReport {
    ParamSet theta;
    int n_epochs = 0;
    int replications = 0;
    PerParam<ParamSummary> params;
};

/// Monte-Carlo sensitivity study: for each replicate, simulate, fit, build
/// asymptotic (and optionally bootstrap) intervals, then average. Replicate r
/// uses seeds derived from (seed, r), so the report does not depend on
/// `threads`.
StudyReport run_study(const StudyConfig& cfg);

/// Header: parameter,n,avg_bias,mse,asym_lo,asym_hi,boot_lo,boot_hi,cov_asym,cov_boot
void write_study_csv_header(std::ostream& os);
/// One row per parameter; bootstrap columns empty when not computed.
void write_study_csv_rows(std::ostream& os, const StudyReport& report);

} // namespace ttf
