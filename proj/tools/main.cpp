#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cli/commands.hpp"

using namespace ttf;
using namespace ttf::cli;

int main(int argc, char** argv)
{
    CLI::App app{"Time-to-failure modelling of machine event logs"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    std::string output;
    std::string format = "csv";
    std::string mu_info = "second-derivative";
    app.add_option("--seed", global.seed, "Random seed")->capture_default_str();
    app.add_option("--alpha", global.alpha, "Significance level of the intervals")
        ->capture_default_str()
        ->check(CLI::Range(1e-12, 1.0 - 1e-12));
    app.add_option("--output,-o", output, "Write the report to this path instead of stdout");
    app.add_option("--format", format, "Report format")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", global.threads, "Worker threads (0: all cores)")->capture_default_str();
    app.add_option("--mu-info", mu_info, "Observed information used for the mu interval")
        ->capture_default_str()
        ->check(CLI::IsMember({"second-derivative", "printed"}));

    std::string theta_text;
    std::string n_text = "50,100,150";
    std::string covariates_text;
    std::string target_text = "lambda1";
    double fixed_p = 0.0;

    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "Closed-form MLEs with asymptotic and bootstrap intervals");
    fit_cmd->add_option("input", fit.input, "Event-log CSV")->required()->check(CLI::ExistingFile);
    fit_cmd->add_option("--bootstrap", fit.bootstrap, "Bootstrap replicates (0: none)")->capture_default_str();
    fit_cmd->add_flag("--allow-censored", fit.allow_censored, "Accept a final epoch without FAIL");

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Draw a synthetic event log");
    sim_cmd->add_option("--theta", theta_text, "lambda1,lambda2,p,mu")->required();
    sim_cmd->add_option("--n", sim.n, "Number of epochs")->capture_default_str();

    StudyOptions study;
    auto* study_cmd = app.add_subcommand("study", "Monte-Carlo study of the estimators");
    study_cmd->add_option("--theta", theta_text, "lambda1,lambda2,p,mu")->required();
    study_cmd->add_option("--n", n_text, "Comma-separated sample sizes")->capture_default_str();
    study_cmd->add_option("--replications", study.replications, "Replicates per sample size")->capture_default_str();
    study_cmd->add_option("--bootstrap", study.bootstrap, "Bootstrap replicates per fit (0: none)")
        ->capture_default_str();

    BootstrapOptions boot;
    auto* boot_cmd = app.add_subcommand("bootstrap", "Parametric bootstrap intervals");
    boot_cmd->add_option("input", boot.input, "Event-log CSV")->required()->check(CLI::ExistingFile);
    boot_cmd->add_option("--replicates,-M", boot.replicates, "Bootstrap replicates")->capture_default_str();
    boot_cmd->add_flag("--allow-censored", boot.allow_censored, "Accept a final epoch without FAIL");

    GlmCommandOptions glm;
    auto add_glm_options = [&](CLI::App* cmd, const char* covariate_help) {
        cmd->add_option("input", glm.input, "Event-log CSV")->required()->check(CLI::ExistingFile);
        cmd->add_option("--target", target_text, "lambda1, lambda2 or mu")
            ->capture_default_str()
            ->check(CLI::IsMember({"lambda1", "lambda2", "mu"}));
        cmd->add_option("--covariates", covariates_text, covariate_help);
        cmd->add_option("--fixed-p", fixed_p, "p carried alongside the model (default: the base-model estimate)")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_flag("--allow-censored", glm.allow_censored, "Accept a final epoch without FAIL");
    };
    auto* glm_cmd = app.add_subcommand("glm", "Fit a log-link regression for one rate");
    add_glm_options(glm_cmd, "Comma-separated sensor columns (default: all; \"\" for intercept only)");
    auto* select_cmd = app.add_subcommand("select", "AIC forward selection for one rate");
    add_glm_options(select_cmd, "Candidate sensor columns (default: all)");

    PredictOptions pred;
    auto* pred_cmd = app.add_subcommand("predict", "Expected time to failure per epoch");
    pred_cmd->add_option("input", pred.input, "Event-log CSV")->required()->check(CLI::ExistingFile);
    pred_cmd->add_option("--lambda1-model", pred.lambda1_model, "GLM JSON for lambda1")
        ->required()
        ->check(CLI::ExistingFile);
    pred_cmd->add_option("--lambda2-model", pred.lambda2_model, "GLM JSON for lambda2")
        ->required()
        ->check(CLI::ExistingFile);
    pred_cmd->add_option("--mu-model", pred.mu_model, "GLM JSON for mu")->required()->check(CLI::ExistingFile);
    pred_cmd->add_option("--fixed-p", fixed_p, "p used in the prediction (default: the lambda1 model's)")
        ->check(CLI::Range(0.0, 1.0));
    pred_cmd->add_flag("--allow-censored", pred.allow_censored, "Accept a final epoch without FAIL");

    MetricsOptions metrics;
    std::string actual_column, predicted_column;
    auto* metrics_cmd = app.add_subcommand("metrics", "Compare predicted and realized times to failure");
    metrics_cmd->add_option("--actual", metrics.actual, "Event log or CSV of realized values")
        ->required()
        ->check(CLI::ExistingFile);
    metrics_cmd->add_option("--predicted", metrics.predicted, "Predictions CSV")->required()->check(CLI::ExistingFile);
    metrics_cmd->add_option("--actual-column", actual_column, "Value column of --actual");
    metrics_cmd->add_option("--predicted-column", predicted_column, "Value column of --predicted");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    global.format = format == "json" ? Format::Json : Format::Csv;
    global.mu_info = mu_info == "printed" ? MuInformation::Printed : MuInformation::SecondDerivative;

    std::ostringstream report;
    try {
        if (*fit_cmd) {
            cmd_fit(fit, global, report, std::cerr);
        } else if (*sim_cmd) {
            sim.theta = parse_theta(theta_text);
            cmd_simulate(sim, global, report);
        } else if (*study_cmd) {
            study.theta = parse_theta(theta_text);
            study.n_list = parse_int_list(n_text);
            cmd_study(study, global, report);
        } else if (*boot_cmd) {
            cmd_bootstrap(boot, global, report, std::cerr);
        } else if (*glm_cmd || *select_cmd) {
            CLI::App* cmd = *glm_cmd ? glm_cmd : select_cmd;
            glm.target = parse_target(target_text);
            if (cmd->count("--covariates") > 0)
                glm.covariates = parse_name_list(covariates_text);
            if (cmd->count("--fixed-p") > 0)
                glm.fixed_p = fixed_p;
            if (*glm_cmd)
                cmd_glm(glm, global, report, std::cerr);
            else
                cmd_select(glm, global, report, std::cerr);
        } else if (*pred_cmd) {
            if (pred_cmd->count("--fixed-p") > 0)
                pred.fixed_p = fixed_p;
            cmd_predict(pred, global, report, std::cerr);
        } else if (*metrics_cmd) {
            if (!actual_column.empty())
                metrics.actual_column = actual_column;
            if (!predicted_column.empty())
                metrics.predicted_column = predicted_column;
            cmd_metrics(metrics, global, report);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }

    if (output.empty()) {
        std::cout << report.str();
        std::cout.flush();
        return std::cout ? 0 : 1;
    }
    std::ofstream file(output, std::ios::binary);
    file << report.str();
    if (!file) {
        std::cerr << "error: cannot write '" << output << "'\n";
        return 1;
    }
    return 0;
}
