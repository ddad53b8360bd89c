#include "ttf/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "ttf/parallel.hpp"

namespace ttf {

std::string_view to_string(GlmTarget target)
{
    switch (target) {
    case GlmTarget::Lambda1: return "lambda1";
    case GlmTarget::Lambda2: return "lambda2";
    case GlmTarget::Mu: return "mu";
    }
    return "?";
}

GlmTarget parse_target(std::string_view text)
{
    if (text == "lambda1")
        return GlmTarget::Lambda1;
    if (text == "lambda2")
        return GlmTarget::Lambda2;
    if (text == "mu")
        return GlmTarget::Mu;
    throw Error(ErrorKind::InvalidArgument, "unknown target '" + std::string(text) + "' (lambda1, lambda2, mu)");
}

bool feeds(GlmTarget target, EventType kind)
{
    switch (target) {
    case GlmTarget::Lambda1: return kind == EventType::RunOk;
    case GlmTarget::Lambda2: return kind == EventType::RunAlert;
    case GlmTarget::Mu: return kind != EventType::Fail;
    }
    return false;
}

int CovariateMatrix::absent_rows() const
{
    return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r; }));
}

CovariateMatrix epoch_covariates(const Dataset& data, GlmTarget target)
{
    if (data.sensor_names.empty())
        throw Error(ErrorKind::NoSensors, "dataset carries no sensor columns");
    return epoch_covariates(data, target, data.sensor_names);
}

CovariateMatrix epoch_covariates(const Dataset& data, GlmTarget target, const std::vector<std::string>& columns)
{
    std::vector<std::size_t> source;
    source.reserve(columns.size());
    for (const auto& name : columns) {
        const auto it = std::find(data.sensor_names.begin(), data.sensor_names.end(), name);
        if (it == data.sensor_names.end())
            throw Error(ErrorKind::MissingCovariate, "no sensor named '" + name + "'");
        source.push_back(static_cast<std::size_t>(it - data.sensor_names.begin()));
    }

    CovariateMatrix x;
    x.target = target;
    x.column_names = columns;
    x.epoch_ids.reserve(data.epochs.size());
    x.rows.reserve(data.epochs.size());
    for (const auto& epoch : data.epochs) {
        x.epoch_ids.push_back(epoch.id);
        std::vector<double> sum(source.size(), 0.0);
        int used = 0;
        for (const auto& ev : epoch.events) {
            if (!feeds(target, ev.kind))
                continue;
            ++used;
            for (std::size_t k = 0; k < source.size(); ++k)
                sum[k] += ev.sensors.at(source[k]);
        }
        if (used == 0) {
            x.rows.emplace_back();
            continue;
        }
        for (auto& v : sum)
            v /= used;
        x.rows.emplace_back(std::move(sum));
    }
    return x;
}

CovariateMatrix select_columns(const CovariateMatrix& x, const std::vector<std::size_t>& keep)
{
    CovariateMatrix out;
    out.target = x.target;
    out.epoch_ids = x.epoch_ids;
    for (std::size_t k : keep)
        out.column_names.push_back(x.column_names.at(k));
    out.rows.reserve(x.rows.size());
    for (const auto& row : x.rows) {
        if (!row) {
            out.rows.emplace_back();
            continue;
        }
        std::vector<double> r;
        r.reserve(keep.size());
        for (std::size_t k : keep)
            r.push_back((*row)[k]);
        out.rows.emplace_back(std::move(r));
    }
    return out;
}

std::vector<std::string> GlmModel::column_names() const
{
    std::vector<std::string> names;
    names.reserve(coefficients.size());
    for (const auto& [name, coef] : coefficients)
        names.push_back(name);
    return names;
}

double GlmModel::rate(const std::vector<double>& values) const
{
    if (values.size() != coefficients.size())
        throw Error(ErrorKind::AlignmentError, "covariate vector length does not match model");
    double eta = intercept;
    for (std::size_t k = 0; k < values.size(); ++k)
        eta += coefficients[k].second * values[k];
    return std::exp(eta);
}

namespace {

// One usable epoch of a target component: term = count * eta - weight * exp(eta).
struct Design {
    std::vector<double> count;
    std::vector<double> weight;
    std::vector<std::vector<double>> features;  // selected columns, original scale
};

void check_alignment(const Dataset& data, const CovariateMatrix& x)
{
    if (x.rows.size() != data.epochs.size() || x.epoch_ids.size() != data.epochs.size())
        throw Error(ErrorKind::AlignmentError, "covariate rows do not match the dataset's epochs");
    for (std::size_t i = 0; i < data.epochs.size(); ++i)
        if (x.epoch_ids[i] != data.epochs[i].id)
            throw Error(ErrorKind::AlignmentError,
                        "covariate row " + std::to_string(i) + " belongs to epoch " + std::to_string(x.epoch_ids[i]));
    for (const auto& row : x.rows)
        if (row && row->size() != x.cols())
            throw Error(ErrorKind::AlignmentError, "covariate row width differs from the column count");
}

std::vector<std::size_t> locate(const CovariateMatrix& x, const std::vector<std::string>& names)
{
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& name : names) {
        const auto it = std::find(x.column_names.begin(), x.column_names.end(), name);
        if (it == x.column_names.end())
            throw Error(ErrorKind::AlignmentError, "covariate matrix lacks model column '" + name + "'");
        idx.push_back(static_cast<std::size_t>(it - x.column_names.begin()));
    }
    return idx;
}

std::pair<double, double> component_weights(const Epoch& epoch, GlmTarget target)
{
    switch (target) {
    case GlmTarget::Lambda1:
        return {static_cast<double>(epoch.count_of(EventType::RunOk)), epoch.duration_of(EventType::RunOk)};
    case GlmTarget::Lambda2:
        return {static_cast<double>(epoch.count_of(EventType::RunAlert)), epoch.duration_of(EventType::RunAlert)};
    case GlmTarget::Mu:
        return {static_cast<double>(epoch.running_count() - 1), 1.0};
    }
    return {0.0, 0.0};
}

Design build_design(const Dataset& data, const CovariateMatrix& x, GlmTarget target,
                    const std::vector<std::size_t>& columns)
{
    check_alignment(data, x);
    if (x.target != target)
        throw Error(ErrorKind::AlignmentError, "covariates were aggregated for target " +
                                                   std::string(to_string(x.target)) + ", not " +
                                                   std::string(to_string(target)));
    Design d;
    for (std::size_t i = 0; i < data.epochs.size(); ++i) {
        const Epoch& epoch = data.epochs[i];
        if (epoch.censored() || !x.rows[i])
            continue;
        const auto [c, w] = component_weights(epoch, target);
        d.count.push_back(c);
        d.weight.push_back(w);
        std::vector<double> f;
        f.reserve(columns.size());
        for (std::size_t k : columns)
            f.push_back((*x.rows[i])[k]);
        d.features.push_back(std::move(f));
    }
    return d;
}

double linear_predictor(const GlmModel& model, const std::vector<double>& f)
{
    double eta = model.intercept;
    for (std::size_t k = 0; k < f.size(); ++k)
        eta += model.coefficients[k].second * f[k];
    return eta;
}

Design model_design(const GlmModel& model, const Dataset& data, const CovariateMatrix& x)
{
    return build_design(data, x, model.target, locate(x, model.column_names()));
}

} // namespace

double glm_log_likelihood(const GlmModel& model, const Dataset& data, const CovariateMatrix& x)
{
    const Design d = model_design(model, data, x);
    double total = 0.0;
    for (std::size_t i = 0; i < d.count.size(); ++i) {
        const double eta = linear_predictor(model, d.features[i]);
        total += d.count[i] * eta - d.weight[i] * std::exp(eta);
    }
    return total;
}

std::vector<double> glm_gradient(const GlmModel& model, const Dataset& data, const CovariateMatrix& x)
{
    const Design d = model_design(model, data, x);
    std::vector<double> g(1 + model.coefficients.size(), 0.0);
    for (std::size_t i = 0; i < d.count.size(); ++i) {
        const double resid = d.count[i] - d.weight[i] * std::exp(linear_predictor(model, d.features[i]));
        g[0] += resid;
        for (std::size_t k = 0; k < d.features[i].size(); ++k)
            g[k + 1] += resid * d.features[i][k];
    }
    return g;
}

std::vector<double> glm_hessian_diagonal(const GlmModel& model, const Dataset& data, const CovariateMatrix& x)
{
    const Design d = model_design(model, data, x);
    std::vector<double> h(1 + model.coefficients.size(), 0.0);
    for (std::size_t i = 0; i < d.count.size(); ++i) {
        const double we = d.weight[i] * std::exp(linear_predictor(model, d.features[i]));
        h[0] -= we;
        for (std::size_t k = 0; k < d.features[i].size(); ++k)
            h[k + 1] -= we * d.features[i][k] * d.features[i][k];
    }
    return h;
}

namespace {

struct NewtonOutcome {
    Eigen::VectorXd theta;
    double value = 0.0;
    int iterations = 0;
};

double objective(const Eigen::MatrixXd& z, const Eigen::VectorXd& c, const Eigen::VectorXd& w,
                 const Eigen::VectorXd& theta)
{
    const Eigen::VectorXd eta = z * theta;
    return c.dot(eta) - w.dot(eta.array().exp().matrix());
}

// Damped Newton ascent on a concave objective with Armijo backtracking.
NewtonOutcome maximize(const Eigen::MatrixXd& z, const Eigen::VectorXd& c, const Eigen::VectorXd& w,
                       Eigen::VectorXd theta, const GlmOptions& opt)
{
    double value = objective(z, c, w, theta);
    double grad_norm = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        const Eigen::VectorXd mean = (w.array() * (z * theta).array().exp()).matrix();
        const Eigen::VectorXd grad = z.transpose() * (c - mean);
        grad_norm = grad.lpNorm<Eigen::Infinity>();
        if (grad_norm < opt.gradient_tolerance)
            return {theta, value, iter};

        const Eigen::MatrixXd info = z.transpose() * mean.asDiagonal() * z;
        Eigen::LLT<Eigen::MatrixXd> llt(info);
        Eigen::VectorXd step;
        if (llt.info() == Eigen::Success)
            step = llt.solve(grad);
        else
            step = grad / std::max(1.0, grad_norm);

        const double slope = grad.dot(step);
        double t = 1.0;
        double next_value = value;
        Eigen::VectorXd next = theta;
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
            next = theta + t * step;
            next_value = objective(z, c, w, next);
            if (std::isfinite(next_value) && next_value >= value + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
        }
        const double scale = std::max(1.0, std::fabs(value));
        if (!accepted) {
            // No ascent left at working precision.
            if (std::fabs(slope) <= 1e-10 * scale)
                return {theta, value, iter};
            break;
        }
        const double change = std::fabs(next_value - value) / scale;
        theta = next;
        value = next_value;
        if (change < opt.relative_tolerance)
            return {theta, value, iter + 1};
    }

    std::ostringstream os;
    os << "GLM fit did not converge in " << opt.max_iterations << " iterations; final gradient max-norm "
       << grad_norm;
    throw Error(ErrorKind::NotConverged, os.str());
}

} // namespace

GlmModel fit_glm(const Dataset& data, const CovariateMatrix& x, GlmTarget target, double fixed_p,
                 const GlmOptions& options)
{
    if (!(fixed_p >= 0.0 && fixed_p <= 1.0))
        throw Error(ErrorKind::DomainError, "fixed p must lie in [0, 1]");

    GlmModel model;
    model.target = target;
    model.fixed_p = fixed_p;

    std::vector<std::size_t> all(x.cols());
    for (std::size_t k = 0; k < all.size(); ++k)
        all[k] = k;
    const Design full = build_design(data, x, target, all);
    const std::size_t rows = full.count.size();

    // Column scaling over the usable rows; constant columns are dropped.
    std::vector<std::size_t> kept;
    std::vector<double> means, sds;
    for (std::size_t k = 0; k < x.cols(); ++k) {
        double mean = 0.0;
        for (const auto& f : full.features)
            mean += f[k];
        mean = rows ? mean / rows : 0.0;
        double var = 0.0;
        for (const auto& f : full.features)
            var += (f[k] - mean) * (f[k] - mean);
        const double sd = rows > 1 ? std::sqrt(var / (rows - 1)) : 0.0;
        if (!(sd > 1e-12 * std::max(1.0, std::fabs(mean)))) {
            model.warnings.push_back("column '" + x.column_names[k] + "' is constant over usable epochs; dropped");
            continue;
        }
        kept.push_back(k);
        means.push_back(mean);
        sds.push_back(sd);
    }

    const std::size_t p = kept.size() + 1;
    if (rows <= p)
        model.warnings.push_back("only " + std::to_string(rows) + " usable epochs for " + std::to_string(p) +
                                 " coefficients");

    double total_count = 0.0, total_weight = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        total_count += full.count[i];
        total_weight += full.weight[i];
    }
    if (!(total_count > 0.0) || !(total_weight > 0.0))
        throw Error(ErrorKind::DomainError, "target " + std::string(to_string(target)) +
                                                " has no events to fit (closed-form estimate is 0 or undefined)");

    Eigen::MatrixXd z(rows, p);
    Eigen::VectorXd c(rows), w(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        z(i, 0) = 1.0;
        for (std::size_t j = 0; j < kept.size(); ++j)
            z(i, j + 1) = (full.features[i][kept[j]] - means[j]) / sds[j];
        c(i) = full.count[i];
        w(i) = full.weight[i];
    }

    if (p > 1) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
        qr.setThreshold(1e-9);
        if (static_cast<std::size_t>(qr.rank()) < p) {
            std::string offending;
            const auto& perm = qr.colsPermutation().indices();
            for (Eigen::Index j = qr.rank(); j < perm.size(); ++j) {
                const auto col = static_cast<std::size_t>(perm(j));
                if (!offending.empty())
                    offending += ", ";
                offending += col == 0 ? std::string("(intercept)") : x.column_names[kept[col - 1]];
            }
            throw Error(ErrorKind::RankDeficient, "collinear covariates: " + offending);
        }
    }

    Eigen::VectorXd start = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    start(0) = std::log(total_count / total_weight);
    const NewtonOutcome fit = maximize(z, c, w, start, options);

    double intercept = fit.theta(0);
    for (std::size_t j = 0; j < kept.size(); ++j) {
        const double coef = fit.theta(static_cast<Eigen::Index>(j + 1)) / sds[j];
        intercept -= coef * means[j];
        model.coefficients.emplace_back(x.column_names[kept[j]], coef);
    }
    model.intercept = intercept;
    model.iterations = fit.iterations;
    model.loglik = glm_log_likelihood(model, data, x);
    model.aic = 2.0 * static_cast<double>(1 + model.coefficients.size()) - 2.0 * model.loglik;
    return model;
}

SelectionResult forward_select(const Dataset& data, const CovariateMatrix& x, GlmTarget target, double fixed_p,
                               const GlmOptions& options)
{
    SelectionResult result;
    std::vector<std::size_t> chosen;
    GlmModel current = fit_glm(data, select_columns(x, chosen), target, fixed_p, options);
    result.intercept_only_aic = current.aic;

    for (;;) {
        std::vector<std::size_t> candidates;
        for (std::size_t k = 0; k < x.cols(); ++k)
            if (std::find(chosen.begin(), chosen.end(), k) == chosen.end())
                candidates.push_back(k);
        if (candidates.empty())
            break;

        std::vector<std::optional<GlmModel>> fits(candidates.size());
        std::vector<std::string> failures(candidates.size());
        parallel_for(candidates.size(), options.threads, [&](std::size_t j) {
            auto cols = chosen;
            cols.push_back(candidates[j]);
            try {
                fits[j] = fit_glm(data, select_columns(x, cols), target, fixed_p, options);
            } catch (const Error& e) {
                failures[j] = "skipped '" + x.column_names[candidates[j]] + "': " + e.what();
            }
        });

        std::optional<std::size_t> best;
        for (std::size_t j = 0; j < candidates.size(); ++j) {
            if (!failures[j].empty())
                result.notes.push_back(failures[j]);
            if (fits[j] && (!best || fits[j]->aic < fits[*best]->aic))
                best = j;
        }
        if (!best || !(fits[*best]->aic < current.aic))
            break;

        chosen.push_back(candidates[*best]);
        current = std::move(*fits[*best]);
        result.trail.push_back({x.column_names[candidates[*best]], current.aic});
    }

    current.trail = result.trail;
    result.model = std::move(current);
    return result;
}

} // namespace ttf
