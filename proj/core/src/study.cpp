#include "ttf/study.hpp"

#include <cmath>

#include "ttf/format.hpp"
#include "ttf/parallel.hpp"
#include "ttf/random.hpp"
#include "ttf/sampler.hpp"

namespace ttf {

namespace {

constexpr std::uint64_t kBootstrapSalt = 0x6a09e667f3bcc909ULL;

struct ReplicateOutcome {
    PerParam<std::optional<double>> estimate;
    PerParam<std::optional<ConfidenceInterval>> asymptotic;
    PerParam<std::optional<ConfidenceInterval>> bootstrap;
};

} // namespace

StudyReport run_study(const StudyConfig& cfg)
{
    check_domain(cfg.theta);
    if (cfg.replications < 1 || cfg.n_epochs < 1)
        throw Error(ErrorKind::InvalidArgument, "study needs replications >= 1 and n_epochs >= 1");
    if (cfg.bootstrap_M == 1 || cfg.bootstrap_M < 0)
        throw Error(ErrorKind::InvalidArgument, "bootstrap_M must be 0 (off) or >= 2");

    std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(cfg.replications));
    parallel_for(outcomes.size(), cfg.threads, [&](std::size_t r) {
        Rng rng(derive_seed(cfg.seed, r));
        const FitResult fit = fit_from_stats(sample_stats(cfg.theta, cfg.n_epochs, rng), cfg.mu_info);
        auto& out = outcomes[r];
        for (Param which : kAllParams)
            out.estimate[index(which)] = fit.estimate(which);
        out.asymptotic = asymptotic_ci(fit, cfg.alpha, cfg.mu_info);
        if (cfg.bootstrap_M > 0)
            out.bootstrap = bootstrap_ci(fit, cfg.n_epochs, cfg.bootstrap_M, cfg.alpha,
                                         derive_seed(cfg.seed ^ kBootstrapSalt, r), 1)
                                .intervals;
    });

    StudyReport report;
    report.theta = cfg.theta;
    report.n_epochs = cfg.n_epochs;
    report.replications = cfg.replications;

    for (Param which : kAllParams) {
        const std::size_t k = index(which);
        const double truth = value_of(cfg.theta, which);
        ParamSummary& s = report.params[k];
        double bias = 0.0, sq = 0.0, alo = 0.0, ahi = 0.0, blo = 0.0, bhi = 0.0;
        int acover = 0, bcover = 0, bused = 0;
        for (const auto& o : outcomes) {
            if (!o.estimate[k]) {
                ++s.skipped;
                continue;
            }
            ++s.used;
            const double err = *o.estimate[k] - truth;
            bias += std::fabs(err);
            sq += err * err;
            const auto& a = *o.asymptotic[k];
            alo += a.lower;
            ahi += a.upper;
            acover += a.contains(truth) ? 1 : 0;
            if (const auto& b = o.bootstrap[k]) {
                ++bused;
                blo += b->lower;
                bhi += b->upper;
                bcover += b->contains(truth) ? 1 : 0;
            }
        }
        if (s.used > 0) {
            const double u = s.used;
            s.avg_bias = bias / u;
            s.mse = sq / u;
            s.avg_asymptotic = {alo / u, ahi / u};
            s.coverage_asymptotic = acover / u;
        }
        if (cfg.bootstrap_M > 0 && bused > 0) {
            s.avg_bootstrap = Interval{blo / bused, bhi / bused};
            s.coverage_bootstrap = static_cast<double>(bcover) / bused;
        }
    }
    return report;
}

void write_study_csv_header(std::ostream& os)
{
    os << "parameter,n,avg_bias,mse,asym_lo,asym_hi,boot_lo,boot_hi,cov_asym,cov_boot\n";
}

void write_study_csv_rows(std::ostream& os, const StudyReport& report)
{
    for (Param which : kAllParams) {
        const auto& s = report.params[index(which)];
        os << to_string(which) << ',' << report.n_epochs << ',' << format_double(s.avg_bias) << ','
           << format_double(s.mse) << ',' << format_double(s.avg_asymptotic.lower) << ','
           << format_double(s.avg_asymptotic.upper) << ',';
        if (s.avg_bootstrap)
            os << format_double(s.avg_bootstrap->lower) << ',' << format_double(s.avg_bootstrap->upper);
        else
            os << ',';
        os << ',' << format_double(s.coverage_asymptotic) << ',' << format_double(s.coverage_bootstrap) << '\n';
    }
}

} // namespace ttf
