#include "ttf/predict.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ttf/format.hpp"

namespace ttf {

namespace {

void check_rates(double lambda1, double lambda2, double mu, double p)
{
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0) || !(mu >= 0.0) || !(p >= 0.0 && p <= 1.0) || !std::isfinite(lambda1) ||
        !std::isfinite(lambda2) || !std::isfinite(mu))
        throw Error(ErrorKind::DomainError, "expected time to fail needs lambda1, lambda2 > 0, mu >= 0, p in [0, 1]");
}

} // namespace

double expected_time_to_fail(double lambda1, double lambda2, double mu, double p)
{
    check_rates(lambda1, lambda2, mu, p);
    const double e = std::exp(-2.0 * mu);
    return (1.0 - e) / 4.0 * ((mu + 1.0) / lambda1 + (mu + 1.0) / lambda2) +
           (1.0 + e) / 4.0 * ((mu + 2.0 * p) / lambda1 + (mu + 2.0 * (1.0 - p)) / lambda2);
}

double expected_time_odd_part(double lambda1, double lambda2, double mu, double p)
{
    check_rates(lambda1, lambda2, mu, p);
    const double e = std::exp(-2.0 * mu);
    return mu / 4.0 * (1.0 - e) * (1.0 / lambda1 + 1.0 / lambda2) + 0.5 * (1.0 + e) * (p / lambda1 + (1.0 - p) / lambda2);
}

double expected_time_even_part(double lambda1, double lambda2, double mu)
{
    check_rates(lambda1, lambda2, mu, 0.5);
    const double e = std::exp(-2.0 * mu);
    return 0.25 * (1.0 / lambda1 + 1.0 / lambda2) * (mu * (1.0 + e) + (1.0 - e));
}

namespace {

struct TargetInputs {
    CovariateMatrix x;
    std::optional<std::vector<double>> fallback;    // event-level means over the dataset
};

TargetInputs prepare(const GlmModel& model, GlmTarget expected, const Dataset& data)
{
    if (model.target != expected)
        throw Error(ErrorKind::InvalidArgument, "model for " + std::string(to_string(expected)) + " has target " +
                                                    std::string(to_string(model.target)));
    TargetInputs in;
    in.x = epoch_covariates(data, expected, model.column_names());

    std::vector<std::size_t> source;
    for (const auto& name : in.x.column_names)
        source.push_back(static_cast<std::size_t>(
            std::find(data.sensor_names.begin(), data.sensor_names.end(), name) - data.sensor_names.begin()));
    std::vector<double> sum(source.size(), 0.0);
    std::size_t used = 0;
    for (const auto& epoch : data.epochs)
        for (const auto& ev : epoch.events)
            if (feeds(expected, ev.kind)) {
                ++used;
                for (std::size_t k = 0; k < source.size(); ++k)
                    sum[k] += ev.sensors.at(source[k]);
            }
    if (used > 0) {
        for (auto& v : sum)
            v /= static_cast<double>(used);
        in.fallback = std::move(sum);
    }
    return in;
}

double target_rate(const GlmModel& model, const TargetInputs& in, std::size_t row, Prediction& out)
{
    if (model.coefficients.empty())
        return model.rate({});
    if (const auto& values = in.x.rows[row])
        return model.rate(*values);
    if (!in.fallback)
        throw Error(ErrorKind::MissingCovariate, "no " + std::string(to_string(model.target)) +
                                                     " events anywhere in the dataset to average covariates over");
    out.warnings.push_back("EmptyTargetSubset: epoch " + std::to_string(in.x.epoch_ids[row]) + " has no " +
                           std::string(to_string(model.target)) + " events; using dataset-wide covariate means");
    return model.rate(*in.fallback);
}

struct Predictor {
    const PredictionModels& models;
    const Dataset& data;
    double fixed_p;
    TargetInputs l1, l2, mu;

    Predictor(const PredictionModels& m, const Dataset& d, double p)
        : models(m), data(d), fixed_p(p), l1(prepare(m.lambda1, GlmTarget::Lambda1, d)),
          l2(prepare(m.lambda2, GlmTarget::Lambda2, d)), mu(prepare(m.mu, GlmTarget::Mu, d))
    {
        if (!(p >= 0.0 && p <= 1.0))
            throw Error(ErrorKind::DomainError, "fixed p must lie in [0, 1]");
    }

    Prediction at(std::size_t row) const
    {
        Prediction out;
        out.epoch_id = data.epochs[row].id;
        out.p = fixed_p;
        out.lambda1 = target_rate(models.lambda1, l1, row, out);
        out.lambda2 = target_rate(models.lambda2, l2, row, out);
        out.mu = target_rate(models.mu, mu, row, out);
        out.expected_ttf = expected_time_to_fail(*out.lambda1, *out.lambda2, *out.mu, fixed_p);
        return out;
    }
};

} // namespace

Prediction predict_epoch(const PredictionModels& models, const Dataset& data, std::int64_t epoch_id, double fixed_p)
{
    const auto it = std::find_if(data.epochs.begin(), data.epochs.end(), [&](const Epoch& e) { return e.id == epoch_id; });
    if (it == data.epochs.end())
        throw Error(ErrorKind::InvalidArgument, "no epoch with id " + std::to_string(epoch_id));
    const Predictor predictor(models, data, fixed_p);
    return predictor.at(static_cast<std::size_t>(it - data.epochs.begin()));
}

std::vector<Prediction> predict_all(const PredictionModels& models, const Dataset& data, double fixed_p)
{
    const Predictor predictor(models, data, fixed_p);
    std::vector<Prediction> out;
    for (std::size_t i = 0; i < data.epochs.size(); ++i)
        if (!data.epochs[i].censored())
            out.push_back(predictor.at(i));
    return out;
}

Prediction predict_out_of_sample(std::span<const Prediction> predictions)
{
    if (predictions.empty())
        throw Error(ErrorKind::EmptyList, "out-of-sample prediction needs at least one epoch prediction");
    Prediction out;
    double sum = 0.0;
    for (const auto& p : predictions)
        sum += p.expected_ttf;
    out.expected_ttf = sum / static_cast<double>(predictions.size());
    out.p = predictions.front().p;
    return out;
}

PredictionMetrics prediction_metrics(std::span<const double> actual, std::span<const double> predicted)
{
    if (actual.size() != predicted.size())
        throw Error(ErrorKind::LengthMismatch, "actual has " + std::to_string(actual.size()) + " values, predicted " +
                                                   std::to_string(predicted.size()));
    if (actual.size() < 2)
        throw Error(ErrorKind::InvalidArgument, "metrics need at least 2 pairs");

    PredictionMetrics m;
    m.count = actual.size();
    const double n = static_cast<double>(m.count);
    for (std::size_t i = 0; i < m.count; ++i) {
        const double d = std::fabs(actual[i] - predicted[i]);
        m.mse += d * d;
        m.mae += d;
        m.max_error = std::max(m.max_error, d);
    }
    m.mse /= n;
    m.mae /= n;

    const double ma = std::accumulate(actual.begin(), actual.end(), 0.0) / n;
    const double mp = std::accumulate(predicted.begin(), predicted.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, spp = 0.0;
    for (std::size_t i = 0; i < m.count; ++i) {
        const double a = actual[i] - ma;
        const double p = predicted[i] - mp;
        sab += a * p;
        saa += a * a;
        spp += p * p;
    }
    const auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    };
    if (!constant(actual) && !constant(predicted) && saa > 0.0 && spp > 0.0)
        m.correlation = std::clamp(sab / std::sqrt(saa * spp), -1.0, 1.0);
    return m;
}

void write_predictions_csv(std::ostream& os, std::span<const Prediction> predictions)
{
    os << "epoch_id,lambda1,lambda2,mu,p,expected_ttf\n";
    for (const auto& p : predictions) {
        if (p.epoch_id)
            os << *p.epoch_id;
        else
            os << "out_of_sample";
        os << ',' << format_double(p.lambda1) << ',' << format_double(p.lambda2) << ',' << format_double(p.mu) << ','
           << format_double(p.p) << ',' << format_double(p.expected_ttf) << '\n';
    }
}

} // namespace ttf
