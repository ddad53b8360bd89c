#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "event_log.hpp"
#include "ttf/format.hpp"
#include "ttf/predict.hpp"
#include "ttf/random.hpp"
#include "ttf/sampler.hpp"
#include "ttf/study.hpp"

namespace ttf::cli {

using json = nlohmann::ordered_json;

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view text)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        out.push_back(trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos)
            return out;
        start = comma + 1;
    }
}

std::optional<double> to_real(std::string_view s)
{
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

std::optional<std::int64_t> to_int(std::string_view s)
{
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

json optional_number(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

std::string_view mu_info_name(MuInformation m)
{
    return m == MuInformation::Printed ? "printed" : "second-derivative";
}

void emit_diagnostics(std::ostream& diag, const IngestResult& in)
{
    for (auto id : in.censored_epochs)
        diag << "# censored epoch " << id << " excluded from estimation\n";
}

json diagnostics_json(const IngestResult& in)
{
    json d;
    d["censored_epochs"] = in.censored_epochs;
    return d;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Every name must be a sensor of `data`; unknown names get a suggestion.
void require_sensors(const Dataset& data, const std::vector<std::string>& names, std::string_view context)
{
    for (const auto& name : names) {
        if (std::find(data.sensor_names.begin(), data.sensor_names.end(), name) != data.sensor_names.end())
            continue;
        std::string message = std::string(context) + ": unknown covariate '" + name + "'";
        if (auto hint = nearest_name(name, data.sensor_names))
            message += " (did you mean '" + *hint + "'?)";
        throw Error(ErrorKind::MissingCovariate, message);
    }
}

double default_fixed_p(const Dataset& data)
{
    return fit_mle(data).p;
}

} // namespace

ParamSet parse_theta(const std::string& text)
{
    const auto cells = split(text);
    if (cells.size() != 4)
        throw Error(ErrorKind::InvalidArgument, "--theta needs 4 values lambda1,lambda2,p,mu; got '" + text + "'");
    std::array<double, 4> v{};
    for (std::size_t i = 0; i < 4; ++i) {
        const auto x = to_real(cells[i]);
        if (!x)
            throw Error(ErrorKind::InvalidArgument, "--theta value '" + std::string(cells[i]) + "' is not a number");
        v[i] = *x;
    }
    ParamSet theta{v[0], v[1], v[3], v[2]};
    try {
        check_domain(theta);
    } catch (const Error& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("--theta: ") + e.what());
    }
    return theta;
}

std::vector<std::string> parse_name_list(const std::string& text)
{
    std::vector<std::string> out;
    if (trim(text).empty())
        return out;
    for (auto cell : split(text)) {
        if (cell.empty())
            throw Error(ErrorKind::InvalidArgument, "empty name in list '" + text + "'");
        out.emplace_back(cell);
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> out;
    for (auto cell : split(text)) {
        const auto v = to_int(cell);
        if (!v || *v <= 0 || *v > 100'000'000)
            throw Error(ErrorKind::InvalidArgument, "expected a positive integer, got '" + std::string(cell) + "'");
        out.push_back(static_cast<int>(*v));
    }
    return out;
}

std::optional<std::string> nearest_name(const std::string& name, const std::vector<std::string>& candidates)
{
    std::optional<std::string> best;
    std::size_t best_distance = 0;
    for (const auto& c : candidates) {
        std::vector<std::size_t> row(c.size() + 1);
        for (std::size_t j = 0; j <= c.size(); ++j)
            row[j] = j;
        for (std::size_t i = 1; i <= name.size(); ++i) {
            std::size_t diag = row[0];
            row[0] = i;
            for (std::size_t j = 1; j <= c.size(); ++j) {
                const std::size_t up = row[j];
                row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (name[i - 1] == c[j - 1] ? 0u : 1u)});
                diag = up;
            }
        }
        if (!best || row[c.size()] < best_distance) {
            best = c;
            best_distance = row[c.size()];
        }
    }
    if (best && best_distance > std::max<std::size_t>(2, name.size() / 2))
        return std::nullopt;
    return best;
}

void cmd_fit(const FitOptions& opt, const GlobalOptions& global, std::ostream& out, std::ostream& diag)
{
    if (opt.bootstrap < 0 || opt.bootstrap == 1)
        throw Error(ErrorKind::InvalidArgument, "--bootstrap must be 0 or at least 2");
    const auto in = ingest(opt.input, {opt.allow_censored});
    const FitResult fit = fit_mle(in.data, global.mu_info);
    const auto asym = asymptotic_ci(fit, global.alpha, global.mu_info);
    std::optional<BootstrapResult> boot;
    if (opt.bootstrap > 0)
        boot = bootstrap_ci(fit, fit.stats.epochs, opt.bootstrap, global.alpha, global.seed, global.threads);

    if (global.format == Format::Csv) {
        emit_diagnostics(diag, in);
        for (const auto& w : fit.fisher.warnings)
            diag << "# warning: " << w << '\n';
        out << "parameter,mle,asym_lo,asym_hi";
        if (boot)
            out << ",boot_lo,boot_hi";
        out << '\n';
        for (Param p : kAllParams) {
            const auto& ci = asym[index(p)];
            out << to_string(p) << ',' << format_double(fit.estimate(p)) << ','
                << (ci ? format_double(ci->lower) : "") << ',' << (ci ? format_double(ci->upper) : "");
            if (boot) {
                const auto& b = boot->intervals[index(p)];
                out << ',' << (b ? format_double(b->lower) : "") << ',' << (b ? format_double(b->upper) : "");
            }
            out << '\n';
        }
        return;
    }

    json doc;
    doc["n_epochs"] = fit.stats.epochs;
    doc["situations"] = {{"n1", fit.stats.situations[0]},
                         {"n2", fit.stats.situations[1]},
                         {"n3", fit.stats.situations[2]},
                         {"n4", fit.stats.situations[3]}};
    doc["loglik"] = fit.loglik;
    doc["alpha"] = global.alpha;
    doc["mu_information"] = mu_info_name(global.mu_info);
    doc["parameters"] = json::array();
    for (Param p : kAllParams) {
        json row;
        row["parameter"] = to_string(p);
        row["mle"] = optional_number(fit.estimate(p));
        row["information"] = optional_number(fit.fisher.value[index(p)]);
        if (const auto& ci = asym[index(p)])
            row["asymptotic"] = {{"lower", ci->lower}, {"upper", ci->upper}, {"degenerate", ci->degenerate}};
        else
            row["asymptotic"] = nullptr;
        if (boot) {
            if (const auto& b = boot->intervals[index(p)])
                row["bootstrap"] = {{"lower", b->lower}, {"upper", b->upper}, {"skipped", boot->skipped[index(p)]}};
            else
                row["bootstrap"] = nullptr;
        }
        doc["parameters"].push_back(std::move(row));
    }
    if (boot)
        doc["bootstrap_replicates"] = boot->replicates;
    doc["warnings"] = fit.fisher.warnings;
    doc["diagnostics"] = diagnostics_json(in);
    out << doc.dump(2) << '\n';
}

void cmd_simulate(const SimulateOptions& opt, const GlobalOptions& global, std::ostream& out)
{
    if (global.format != Format::Csv)
        throw Error(ErrorKind::InvalidArgument, "simulate writes event-log CSV only");
    if (opt.n <= 0)
        throw Error(ErrorKind::InvalidArgument, "--n must be positive");
    write_event_log(out, generate_dataset(opt.theta, opt.n, global.seed));
}

void cmd_study(const StudyOptions& opt, const GlobalOptions& global, std::ostream& out)
{
    if (opt.replications <= 0)
        throw Error(ErrorKind::InvalidArgument, "--replications must be positive");
    if (opt.bootstrap < 0 || opt.bootstrap == 1)
        throw Error(ErrorKind::InvalidArgument, "--bootstrap must be 0 or at least 2");
    if (opt.n_list.empty())
        throw Error(ErrorKind::InvalidArgument, "--n needs at least one sample size");

    std::vector<StudyReport> reports;
    for (int n : opt.n_list) {
        StudyConfig cfg;
        cfg.theta = opt.theta;
        cfg.n_epochs = n;
        cfg.replications = opt.replications;
        cfg.bootstrap_M = opt.bootstrap;
        cfg.alpha = global.alpha;
        cfg.seed = derive_seed(global.seed, static_cast<std::uint64_t>(n));
        cfg.threads = global.threads;
        cfg.mu_info = global.mu_info;
        reports.push_back(run_study(cfg));
    }

    if (global.format == Format::Csv) {
        write_study_csv_header(out);
        for (const auto& r : reports)
            write_study_csv_rows(out, r);
        return;
    }
    json doc;
    doc["theta"] = {{"lambda1", opt.theta.lambda1}, {"lambda2", opt.theta.lambda2}, {"p", opt.theta.p}, {"mu", opt.theta.mu}};
    doc["replications"] = opt.replications;
    doc["bootstrap_replicates"] = opt.bootstrap;
    doc["alpha"] = global.alpha;
    doc["studies"] = json::array();
    for (const auto& r : reports) {
        json study;
        study["n"] = r.n_epochs;
        study["parameters"] = json::array();
        for (Param p : kAllParams) {
            const auto& s = r.params[index(p)];
            json row;
            row["parameter"] = to_string(p);
            row["avg_bias"] = s.avg_bias;
            row["mse"] = s.mse;
            row["asymptotic"] = {{"lower", s.avg_asymptotic.lower}, {"upper", s.avg_asymptotic.upper}};
            row["bootstrap"] = s.avg_bootstrap ? json{{"lower", s.avg_bootstrap->lower}, {"upper", s.avg_bootstrap->upper}}
                                               : json(nullptr);
            row["coverage_asymptotic"] = s.coverage_asymptotic;
            row["coverage_bootstrap"] = optional_number(s.coverage_bootstrap);
            row["used"] = s.used;
            row["skipped"] = s.skipped;
            study["parameters"].push_back(std::move(row));
        }
        doc["studies"].push_back(std::move(study));
    }
    out << doc.dump(2) << '\n';
}

void cmd_bootstrap(const BootstrapOptions& opt, const GlobalOptions& global, std::ostream& out, std::ostream& diag)
{
    if (opt.replicates < 2)
        throw Error(ErrorKind::InvalidArgument, "--replicates must be at least 2");
    const auto in = ingest(opt.input, {opt.allow_censored});
    const FitResult fit = fit_mle(in.data, global.mu_info);
    const auto boot = bootstrap_ci(fit, fit.stats.epochs, opt.replicates, global.alpha, global.seed, global.threads);

    if (global.format == Format::Csv) {
        emit_diagnostics(diag, in);
        out << "parameter,mle,boot_lo,boot_hi,skipped\n";
        for (Param p : kAllParams) {
            const auto& b = boot.intervals[index(p)];
            out << to_string(p) << ',' << format_double(fit.estimate(p)) << ',' << (b ? format_double(b->lower) : "")
                << ',' << (b ? format_double(b->upper) : "") << ',' << boot.skipped[index(p)] << '\n';
        }
        return;
    }
    json doc;
    doc["n_epochs"] = fit.stats.epochs;
    doc["replicates"] = boot.replicates;
    doc["alpha"] = global.alpha;
    doc["seed"] = global.seed;
    doc["parameters"] = json::array();
    for (Param p : kAllParams) {
        const auto& b = boot.intervals[index(p)];
        doc["parameters"].push_back({{"parameter", to_string(p)},
                                     {"mle", optional_number(fit.estimate(p))},
                                     {"lower", b ? json(b->lower) : json(nullptr)},
                                     {"upper", b ? json(b->upper) : json(nullptr)},
                                     {"skipped", boot.skipped[index(p)]}});
    }
    doc["diagnostics"] = diagnostics_json(in);
    out << doc.dump(2) << '\n';
}

namespace {

struct GlmInputs {
    IngestResult in;
    CovariateMatrix x;
    double fixed_p = 0.0;
};

GlmInputs prepare_glm(const GlmCommandOptions& opt)
{
    GlmInputs g{ingest(opt.input, {opt.allow_censored}), {}, 0.0};
    const auto columns = opt.covariates ? *opt.covariates : g.in.data.sensor_names;
    require_sensors(g.in.data, columns, "--covariates");
    g.x = epoch_covariates(g.in.data, opt.target, columns);
    g.fixed_p = opt.fixed_p ? *opt.fixed_p : default_fixed_p(g.in.data);
    if (!(g.fixed_p >= 0.0 && g.fixed_p <= 1.0))
        throw Error(ErrorKind::InvalidArgument, "--fixed-p must lie in [0, 1]");
    return g;
}

GlmOptions glm_options(const GlobalOptions& global)
{
    GlmOptions o;
    o.threads = global.threads;
    return o;
}

void write_coefficients_csv(std::ostream& out, const GlmModel& model)
{
    out << "term,estimate\n";
    out << "intercept," << format_double(model.intercept) << '\n';
    for (const auto& [name, coef] : model.coefficients)
        out << name << ',' << format_double(coef) << '\n';
}

} // namespace

void cmd_glm(const GlmCommandOptions& opt, const GlobalOptions& global, std::ostream& out, std::ostream& diag)
{
    const auto g = prepare_glm(opt);
    const GlmModel model = fit_glm(g.in.data, g.x, opt.target, g.fixed_p, glm_options(global));
    emit_diagnostics(diag, g.in);
    for (const auto& w : model.warnings)
        diag << "# warning: " << w << '\n';
    if (global.format == Format::Csv)
        write_coefficients_csv(out, model);
    else
        out << to_json(model) << '\n';
}

void cmd_select(const GlmCommandOptions& opt, const GlobalOptions& global, std::ostream& out, std::ostream& diag)
{
    const auto g = prepare_glm(opt);
    const auto sel = forward_select(g.in.data, g.x, opt.target, g.fixed_p, glm_options(global));
    emit_diagnostics(diag, g.in);
    for (const auto& note : sel.notes)
        diag << "# " << note << '\n';
    for (const auto& w : sel.model.warnings)
        diag << "# warning: " << w << '\n';

    if (global.format == Format::Csv) {
        out << "step,column,aic\n";
        out << "0,," << format_double(sel.intercept_only_aic) << '\n';
        for (std::size_t i = 0; i < sel.trail.size(); ++i)
            out << i + 1 << ',' << sel.trail[i].column << ',' << format_double(sel.trail[i].aic) << '\n';
        return;
    }
    auto doc = json::parse(to_json(sel.model));
    doc["intercept_only_aic"] = sel.intercept_only_aic;
    doc["notes"] = sel.notes;
    out << doc.dump(2) << '\n';
}

void cmd_predict(const PredictOptions& opt, const GlobalOptions& global, std::ostream& out, std::ostream& diag)
{
    const auto in = ingest(opt.input, {opt.allow_censored});
    const auto load = [&](const std::string& path, GlmTarget expected) {
        GlmModel m = glm_model_from_json(read_file(path));
        if (m.target != expected)
            throw Error(ErrorKind::InvalidArgument, "model '" + path + "' has target " + std::string(to_string(m.target)) +
                                                        ", expected " + std::string(to_string(expected)));
        require_sensors(in.data, m.column_names(), "model '" + path + "'");
        return m;
    };
    const PredictionModels models{load(opt.lambda1_model, GlmTarget::Lambda1),
                                  load(opt.lambda2_model, GlmTarget::Lambda2), load(opt.mu_model, GlmTarget::Mu)};
    const double fixed_p = opt.fixed_p ? *opt.fixed_p : models.lambda1.fixed_p;

    auto predictions = predict_all(models, in.data, fixed_p);
    const Prediction oos = predict_out_of_sample(predictions);

    std::vector<std::string> warnings;
    for (const auto& p : predictions)
        warnings.insert(warnings.end(), p.warnings.begin(), p.warnings.end());

    if (global.format == Format::Csv) {
        emit_diagnostics(diag, in);
        for (const auto& w : warnings)
            diag << "# warning: " << w << '\n';
        predictions.push_back(oos);
        write_predictions_csv(out, predictions);
        return;
    }
    json doc;
    doc["fixed_p"] = fixed_p;
    doc["predictions"] = json::array();
    for (const auto& p : predictions)
        doc["predictions"].push_back({{"epoch_id", *p.epoch_id},
                                      {"lambda1", optional_number(p.lambda1)},
                                      {"lambda2", optional_number(p.lambda2)},
                                      {"mu", optional_number(p.mu)},
                                      {"p", p.p},
                                      {"expected_ttf", p.expected_ttf}});
    doc["out_of_sample"] = oos.expected_ttf;
    doc["warnings"] = warnings;
    doc["diagnostics"] = diagnostics_json(in);
    out << doc.dump(2) << '\n';
}

namespace {

/// One value per row, keyed by epoch_id when the source has one.
struct Column {
    std::vector<double> values;
    std::vector<std::int64_t> ids;      // empty when unkeyed
};

Column read_value_column(const std::string& path, const std::optional<std::string>& requested,
                         const std::vector<std::string>& preferred)
{
    std::ifstream file(path);
    if (!file)
        throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(file, line)) {
        ++line_no;
        if (!trim(line).empty())
            break;
    }
    const auto header_cells = split(line);
    std::vector<std::string> header(header_cells.begin(), header_cells.end());

    if (header.size() >= 4 && header[0] == "epoch_id" && header[1] == "seq" && header[2] == "state" &&
        header[3] == "duration") {
        // An event log: the realized time to failure of each complete epoch.
        file.clear();
        file.seekg(0);
        const auto in = ingest(file, {true});
        Column c;
        for (const auto& e : in.data.epochs)
            if (!e.censored()) {
                c.ids.push_back(e.id);
                c.values.push_back(e.total_duration());
            }
        return c;
    }

    const auto find = [&](const std::string& name) -> std::optional<std::size_t> {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto id_col = find("epoch_id");
    std::optional<std::size_t> value_col;
    if (requested) {
        value_col = find(*requested);
        if (!value_col) {
            std::string message = "'" + path + "' has no column '" + *requested + "'";
            if (auto hint = nearest_name(*requested, header))
                message += " (did you mean '" + *hint + "'?)";
            throw Error(ErrorKind::InvalidArgument, message);
        }
    }
    for (const auto& name : preferred)
        if (!value_col)
            value_col = find(name);
    if (!value_col) {
        if (header.size() == 1)
            value_col = 0;
        else if (header.size() == 2 && id_col)
            value_col = *id_col == 0 ? 1 : 0;
        else
            throw Error(ErrorKind::InvalidArgument, "'" + path + "': cannot tell which column holds the values");
    }

    Column c;
    while (std::getline(file, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        const auto cells = split(line);
        if (cells.size() != header.size())
            throw Error(ErrorKind::ParseError, path + ": line " + std::to_string(line_no) + ": expected " +
                                                   std::to_string(header.size()) + " fields");
        if (id_col) {
            const auto id = to_int(cells[*id_col]);
            if (!id) {
                if (cells[*id_col] == "out_of_sample")
                    continue;
                throw Error(ErrorKind::ParseError,
                            path + ": line " + std::to_string(line_no) + ": epoch_id is not an integer");
            }
            c.ids.push_back(*id);
        }
        const auto v = to_real(cells[*value_col]);
        if (!v)
            throw Error(ErrorKind::ParseError, path + ": line " + std::to_string(line_no) + ": value '" +
                                                   std::string(cells[*value_col]) + "' is not a number");
        c.values.push_back(*v);
    }
    return c;
}

} // namespace

void cmd_metrics(const MetricsOptions& opt, const GlobalOptions& global, std::ostream& out)
{
    const Column actual = read_value_column(opt.actual, opt.actual_column, {"actual", "ttf", "time_to_fail", "expected_ttf"});
    const Column predicted = read_value_column(opt.predicted, opt.predicted_column, {"expected_ttf", "predicted"});

    std::vector<double> a = actual.values;
    std::vector<double> p = predicted.values;
    if (!actual.ids.empty() && !predicted.ids.empty()) {
        std::map<std::int64_t, double> by_id;
        for (std::size_t i = 0; i < predicted.ids.size(); ++i)
            if (!by_id.emplace(predicted.ids[i], predicted.values[i]).second)
                throw Error(ErrorKind::ParseError, "duplicate epoch_id " + std::to_string(predicted.ids[i]) + " in '" +
                                                       opt.predicted + "'");
        if (by_id.size() != actual.ids.size())
            throw Error(ErrorKind::LengthMismatch, "actual has " + std::to_string(actual.ids.size()) +
                                                       " epochs, predicted " + std::to_string(by_id.size()));
        p.clear();
        for (auto id : actual.ids) {
            const auto it = by_id.find(id);
            if (it == by_id.end())
                throw Error(ErrorKind::LengthMismatch, "epoch " + std::to_string(id) + " has no prediction");
            p.push_back(it->second);
        }
    }

    const PredictionMetrics m = prediction_metrics(a, p);
    if (global.format == Format::Csv) {
        out << "mse,mae,max_error,correlation,count\n"
            << format_double(m.mse) << ',' << format_double(m.mae) << ',' << format_double(m.max_error) << ','
            << format_double(m.correlation) << ',' << m.count << '\n';
        return;
    }
    json doc{{"mse", m.mse},
             {"mae", m.mae},
             {"max_error", m.max_error},
             {"correlation", optional_number(m.correlation)},
             {"count", m.count}};
    out << doc.dump(2) << '\n';
}

int exit_code_for(const std::exception& e)
{
    if (const auto* err = dynamic_cast<const Error*>(&e))
        return is_numerical(err->kind()) ? 2 : 1;
    return 1;
}

} // namespace ttf::cli
