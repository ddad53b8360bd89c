#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ttf/estimate.hpp"
#include "ttf/glm.hpp"
#include "ttf/params.hpp"

namespace ttf::cli {

enum class Format { Json, Csv };

/// Flags shared by every subcommand.
struct GlobalOptions {
    std::uint64_t seed = 0;
    double alpha = 0.05;
    Format format = Format::Csv;
    unsigned threads = 0;       // 0: hardware concurrency
    MuInformation mu_info = MuInformation::SecondDerivative;
};

/// Parses "lambda1,lambda2,p,mu". Throws Error(InvalidArgument) on malformed
/// text or a value outside the parameter domain.
ParamSet parse_theta(const std::string& text);

/// Comma-separated list; an empty string gives an empty list.
std::vector<std::string> parse_name_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

/// Closest name by edit distance, for "did you mean" hints.
std::optional<std::string> nearest_name(const std::string& name, const std::vector<std::string>& candidates);

struct FitOptions {
    std::string input;
    int bootstrap = 0;          // 0 omits the bootstrap columns
    bool allow_censored = false;
};
void cmd_fit(const FitOptions& opt, const GlobalOptions& global, std::ostream& out, std::ostream& diag);

struct SimulateOptions {
    ParamSet theta;
    int n = 50;
};
void cmd_simulate(const SimulateOptions& opt, const GlobalOptions& global, std::ostream& out);

struct StudyOptions {
    ParamSet theta;
    std::vector<int> n_list{50, 100, 150};
    int replications = 1000;
    int bootstrap = 0;
};
void cmd_study(const StudyOptions& opt, const GlobalOptions& global, std::ostream& out);

struct BootstrapOptions {
    std::string input;
    int replicates = 2000;
    bool allow_censored = false;
};
void cmd_bootstrap(const BootstrapOptions& opt, const GlobalOptions& global, std::ostream& out, std::ostream& diag);

struct GlmCommandOptions {
    std::string input;
    GlmTarget target = GlmTarget::Lambda1;
    std::optional<std::vector<std::string>> covariates;     // absent: every sensor
    std::optional<double> fixed_p;                          // absent: the base-model estimate
    bool allow_censored = false;
};
void cmd_glm(const GlmCommandOptions& opt, const GlobalOptions& global, std::ostream& out, std::ostream& diag);
/// Forward selection over `covariates` (all sensors when absent).
void cmd_select(const GlmCommandOptions& opt, const GlobalOptions& global, std::ostream& out, std::ostream& diag);

struct PredictOptions {
    std::string input;
    std::string lambda1_model;
    std::string lambda2_model;
    std::string mu_model;
    std::optional<double> fixed_p;  // absent: the lambda1 model's fixed_p
    bool allow_censored = false;
};
void cmd_predict(const PredictOptions& opt, const GlobalOptions& global, std::ostream& out, std::ostream& diag);

struct MetricsOptions {
    std::string actual;             // event log or CSV with a value column
    std::string predicted;          // CSV with an expected_ttf (or single value) column
    std::optional<std::string> actual_column;
    std::optional<std::string> predicted_column;
};
void cmd_metrics(const MetricsOptions& opt, const GlobalOptions& global, std::ostream& out);

/// 0 success, 1 validation or parse error, 2 numerical failure.
int exit_code_for(const std::exception& e);

} // namespace ttf::cli
