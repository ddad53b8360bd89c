#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ttf/model.hpp"

namespace ttf {

/// Which base-model parameter a log-link regression explains.
enum class GlmTarget { Lambda1, Lambda2, Mu };

std::string_view to_string(GlmTarget target);
/// Accepts "lambda1", "lambda2", "mu". Throws Error(InvalidArgument).
GlmTarget parse_target(std::string_view text);

/// Running events whose readings feed a target: RunOk for Lambda1, RunAlert
/// for Lambda2, every running event for Mu.
bool feeds(GlmTarget target, EventType kind);

/// Epoch-level covariates: row i is the mean of epoch i's readings over the
/// target's events. Rows align with Dataset::epochs (censored epochs included
/// so indices match); a row is absent when the epoch has no qualifying event.
struct CovariateMatrix {
    GlmTarget target = GlmTarget::Lambda1;
    std::vector<std::string> column_names;
    std::vector<std::int64_t> epoch_ids;
    std::vector<std::optional<std::vector<double>>> rows;

    std::size_t cols() const { return column_names.size(); }
    int absent_rows() const;
};

/// All sensors of `data`. Throws Error(NoSensors) when the dataset has none.
CovariateMatrix epoch_covariates(const Dataset& data, GlmTarget target);

/// The named sensors only, in the given order; an empty list gives a
/// zero-column matrix. Throws Error(MissingCovariate) for unknown names.
CovariateMatrix epoch_covariates(const Dataset& data, GlmTarget target, const std::vector<std::string>& columns);

/// Keeps the listed column indices, in that order.
CovariateMatrix select_columns(const CovariateMatrix& x, const std::vector<std::size_t>& keep);

struct TrailStep {
    std::string column;
    double aic = 0.0;
};

/// rate_i = exp(intercept + sum_k F_ik * coef_k), coefficients on the original
/// covariate scale.
struct GlmModel {
    GlmTarget target = GlmTarget::Lambda1;
    double intercept = 0.0;
    std::vector<std::pair<std::string, double>> coefficients;
    double loglik = 0.0;
    double aic = 0.0;
    double fixed_p = 0.7778;
    std::vector<TrailStep> trail;       // filled by forward_select
    std::vector<std::string> warnings;
    int iterations = 0;

    std::vector<std::string> column_names() const;
    /// exp of the linear predictor; `values` aligned with `coefficients`.
    double rate(const std::vector<double>& values) const;
};

/// The target's separable log-likelihood component, summed over complete
/// epochs with a present covariate row:
///   Lambda1/Lambda2: sum_i N_i * eta_i - X_i * exp(eta_i)   (N_i events, X_i total dwell)
///   Mu:              sum_i (r_i - 1) * eta_i - exp(eta_i)
/// Throws Error(AlignmentError) when X does not match `data` or lacks a model column.
double glm_log_likelihood(const GlmModel& model, const Dataset& data, const CovariateMatrix& x);

/// d/d(intercept, coefficients...) of glm_log_likelihood, original scale.
std::vector<double> glm_gradient(const GlmModel& model, const Dataset& data, const CovariateMatrix& x);

/// Diagonal of the Hessian of glm_log_likelihood; every entry is <= 0.
std::vector<double> glm_hessian_diagonal(const GlmModel& model, const Dataset& data, const CovariateMatrix& x);

struct GlmOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-8;       // max-norm, standardized scale
    double relative_tolerance = 1e-12;      // relative loglik change
    unsigned threads = 1;                   // forward_select candidates
};

/// Maximizes the target component over intercept and every column of `x`.
/// Covariates are standardized internally and coefficients reported on the
/// original scale. Constant columns are dropped with a warning.
/// Throws Error(RankDeficient) naming collinear columns, Error(NotConverged).
GlmModel fit_glm(const Dataset& data, const CovariateMatrix& x, GlmTarget target, double fixed_p,
                 const GlmOptions& options = {});

struct SelectionResult {
    GlmModel model;                 // model.trail == trail
    std::vector<TrailStep> trail;
    double intercept_only_aic = 0.0;
    std::vector<std::string> notes; // skipped candidates
};

/// Greedy AIC forward selection: each step fits every single-column addition,
/// keeps the one with the lowest AIC (ties to the lower column index) and stops
/// when no addition strictly lowers AIC.
SelectionResult forward_select(const Dataset& data, const CovariateMatrix& x, GlmTarget target, double fixed_p,
                               const GlmOptions& options = {});

std::string to_json(const GlmModel& model, int indent = 2);
/// Throws Error(ParseError) on malformed documents.
GlmModel glm_model_from_json(std::string_view text);

} // namespace ttf
