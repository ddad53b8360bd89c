#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ttf/random.hpp"
#include "ttf/sampler.hpp"

namespace oracle {

using ttf::EventType;

double density_loglik(const ttf::ParamSet& theta, const ttf::Dataset& data)
{
    double total = 0.0;
    for (const auto& epoch : data.epochs) {
        if (epoch.events.empty() || epoch.events.back().kind != EventType::Fail)
            continue;
        const int r = static_cast<int>(epoch.events.size()) - 1;
        // P(R = r) = Poisson(r - 1; mu)
        const double k = r - 1;
        total += (k == 0 ? 0.0 : k * std::log(theta.mu)) - theta.mu - std::lgamma(k + 1.0);
        const double first = epoch.events.front().kind == EventType::RunOk ? theta.p : 1.0 - theta.p;
        total += std::log(first);
        for (int j = 0; j < r; ++j) {
            const auto& ev = epoch.events[j];
            const double rate = ev.kind == EventType::RunOk ? theta.lambda1 : theta.lambda2;
            total += std::log(rate) - rate * ev.duration;
        }
    }
    return total;
}

Optimum nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0, double step,
                    int max_evaluations)
{
    const std::size_t d = x0.size();
    Optimum best{x0, f(x0), 1};

    for (double scale = step; best.evaluations < max_evaluations; scale = std::max(scale * 0.5, 1e-7)) {
        std::vector<std::vector<double>> pts(d + 1, best.x);
        std::vector<double> val(d + 1, best.value);
        for (std::size_t i = 0; i < d; ++i) {
            pts[i + 1][i] += scale;
            val[i + 1] = f(pts[i + 1]);
            ++best.evaluations;
        }

        for (int iter = 0; iter < 20000 && best.evaluations < max_evaluations; ++iter) {
            std::vector<std::size_t> order(d + 1);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](auto a, auto b) { return val[a] > val[b]; });
            const auto hi = order.front(), lo = order.back(), second = order[d - 1];
            if (std::fabs(val[hi] - val[lo]) <= 1e-15 * (std::fabs(val[hi]) + 1e-300))
                break;

            std::vector<double> centroid(d, 0.0);
            for (std::size_t i = 0; i <= d; ++i)
                if (i != lo)
                    for (std::size_t j = 0; j < d; ++j)
                        centroid[j] += pts[i][j] / static_cast<double>(d);
            const auto along = [&](double t) {
                std::vector<double> x(d);
                for (std::size_t j = 0; j < d; ++j)
                    x[j] = centroid[j] + t * (pts[lo][j] - centroid[j]);
                return x;
            };

            auto xr = along(-1.0);
            const double fr = f(xr);
            ++best.evaluations;
            if (fr > val[hi]) {
                auto xe = along(-2.0);
                const double fe = f(xe);
                ++best.evaluations;
                if (fe > fr) {
                    pts[lo] = xe;
                    val[lo] = fe;
                } else {
                    pts[lo] = xr;
                    val[lo] = fr;
                }
            } else if (fr > val[second]) {
                pts[lo] = xr;
                val[lo] = fr;
            } else {
                auto xc = fr > val[lo] ? along(-0.5) : along(0.5);
                const double fc = f(xc);
                ++best.evaluations;
                if (fc > std::max(fr, val[lo])) {
                    pts[lo] = xc;
                    val[lo] = fc;
                } else {
                    for (std::size_t i = 0; i <= d; ++i) {
                        if (i == hi)
                            continue;
                        for (std::size_t j = 0; j < d; ++j)
                            pts[i][j] = pts[hi][j] + 0.5 * (pts[i][j] - pts[hi][j]);
                        val[i] = f(pts[i]);
                        ++best.evaluations;
                    }
                }
            }
        }

        const auto top = static_cast<std::size_t>(std::max_element(val.begin(), val.end()) - val.begin());
        if (!(val[top] > best.value) && scale <= 1e-6)
            break;
        if (val[top] > best.value) {
            best.x = pts[top];
            best.value = val[top];
        }
    }
    return best;
}

ttf::ParamSet maximize_base_loglik(const ttf::Dataset& data, const ttf::ParamSet& start)
{
    const auto unpack = [](const std::vector<double>& x) {
        const double s = std::sin(x[3]);
        return ttf::ParamSet{std::exp(x[0]), std::exp(x[1]), std::exp(x[2]), s * s};
    };
    const auto objective = [&](const std::vector<double>& x) {
        const double v = density_loglik(unpack(x), data);
        return std::isfinite(v) ? v : -1e300;
    };
    std::vector<double> x0{std::log(start.lambda1), std::log(start.lambda2), std::log(start.mu),
                           std::asin(std::sqrt(start.p))};
    return unpack(nelder_mead(objective, x0).x);
}

double central_difference(const std::function<double(double)>& f, double x, double h)
{
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

double second_difference(const std::function<double(double)>& f, double x, double h)
{
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

namespace {

/// sum over r >= 1 of P(R = r) * E[T | r], for r of the requested parity.
long double series(double lambda1, double lambda2, double mu, double p, int parity)
{
    const long double a = 1.0L / lambda1, b = 1.0L / lambda2;
    const int last = static_cast<int>(mu + 40.0 * std::sqrt(mu) + 80.0);
    long double total = 0.0L;
    for (int j = 0; j <= last; ++j) {      // j = r - 1
        const int r = j + 1;
        if (r % 2 != parity)
            continue;
        const long double pmf =
            mu == 0.0 ? (j == 0 ? 1.0L : 0.0L)
                      : std::exp(static_cast<long double>(j) * std::log(static_cast<long double>(mu)) - mu -
                                 std::lgamma(static_cast<long double>(j) + 1.0L));
        const long double more = (r + 1) / 2, fewer = r / 2;   // first kind gets the extra event
        const long double given_r = p * (more * a + fewer * b) + (1.0L - p) * (fewer * a + more * b);
        total += pmf * given_r;
    }
    return total;
}

} // namespace

double ettf_series_odd(double lambda1, double lambda2, double mu, double p)
{
    return static_cast<double>(series(lambda1, lambda2, mu, p, 1));
}

double ettf_series_even(double lambda1, double lambda2, double mu)
{
    return static_cast<double>(series(lambda1, lambda2, mu, 0.5, 0));
}

double monte_carlo_ettf(const ttf::ParamSet& theta, int count, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::poisson_distribution<int> extra(theta.mu);
    std::bernoulli_distribution first_ok(theta.p);
    std::exponential_distribution<double> dwell_ok(theta.lambda1), dwell_alert(theta.lambda2);
    long double sum = 0.0L;
    for (int i = 0; i < count; ++i) {
        const int r = 1 + (theta.mu > 0.0 ? extra(gen) : 0);
        bool ok = first_ok(gen);
        double t = 0.0;
        for (int j = 0; j < r; ++j, ok = !ok)
            t += ok ? dwell_ok(gen) : dwell_alert(gen);
        sum += t;
    }
    return static_cast<double>(sum / count);
}

double glm_density_loglik(const ttf::GlmModel& model, const ttf::Dataset& data)
{
    std::vector<std::size_t> cols;
    for (const auto& [name, coef] : model.coefficients)
        cols.push_back(static_cast<std::size_t>(
            std::find(data.sensor_names.begin(), data.sensor_names.end(), name) - data.sensor_names.begin()));
    const auto wanted = [&](EventType k) {
        switch (model.target) {
        case ttf::GlmTarget::Lambda1: return k == EventType::RunOk;
        case ttf::GlmTarget::Lambda2: return k == EventType::RunAlert;
        case ttf::GlmTarget::Mu: return k != EventType::Fail;
        }
        return false;
    };

    double total = 0.0;
    for (const auto& epoch : data.epochs) {
        if (epoch.events.back().kind != EventType::Fail)
            continue;
        std::vector<double> mean(cols.size(), 0.0);
        int used = 0;
        for (const auto& ev : epoch.events)
            if (wanted(ev.kind)) {
                ++used;
                for (std::size_t k = 0; k < cols.size(); ++k)
                    mean[k] += ev.sensors[cols[k]];
            }
        if (used == 0)
            continue;
        double eta = model.intercept;
        for (std::size_t k = 0; k < cols.size(); ++k)
            eta += model.coefficients[k].second * mean[k] / used;
        const double rate = std::exp(eta);

        if (model.target == ttf::GlmTarget::Mu) {
            // Poisson(r - 1; rate) log-pmf without its -ln((r - 1)!) constant.
            const double k = static_cast<double>(epoch.events.size()) - 2.0;
            total += k * std::log(rate) - rate;
        } else {
            for (const auto& ev : epoch.events)
                if (wanted(ev.kind))
                    total += std::log(rate) - rate * ev.duration;
        }
    }
    return total;
}

ttf::Dataset glm_dataset(const GlmTruth& truth, int sensors, int epochs, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    ttf::Rng rng(seed, 0x5eed);
    const auto linear = [&](double b0, const std::vector<double>& b, const std::vector<double>& z) {
        double eta = b0;
        for (std::size_t k = 0; k < b.size() && k < z.size(); ++k)
            eta += b[k] * z[k];
        return std::exp(eta);
    };

    ttf::Dataset d;
    for (int k = 0; k < sensors; ++k)
        d.sensor_names.push_back("F" + std::to_string(k + 1));
    for (int i = 0; i < epochs; ++i) {
        std::vector<double> z(sensors);
        for (auto& v : z)
            v = normal(gen);
        const ttf::ParamSet theta{linear(truth.intercept_l1, truth.coef_l1, z),
                                  linear(truth.intercept_l2, truth.coef_l2, z),
                                  linear(truth.intercept_mu, truth.coef_mu, z), truth.p};
        auto epoch = ttf::sample_epoch(theta, rng, i + 1);
        for (auto& ev : epoch.events)
            ev.sensors = z;
        d.epochs.push_back(std::move(epoch));
    }
    return d;
}

ttf::Dataset table1_dataset()
{
    // Situation counts (25, 10, 3, 7): 35 epochs open with RunOk and
    // #S1 - #S3 = 1606 - 1584. Odd r = 71 and even r = 70 give 3178 events;
    // the first epoch takes the remaining 12.
    const auto build = [](std::int64_t id, EventType first, int r) {
        ttf::Epoch e{id, {}};
        EventType k = first;
        for (int i = 0; i < r; ++i, k = ttf::opposite(k))
            e.events.push_back({k, k == EventType::RunOk ? 1.0 / 0.0261 : 1.0 / 0.0738, {}});
        e.events.push_back({EventType::Fail, 0.0, {}});
        return e;
    };
    ttf::Dataset d;
    std::int64_t id = 0;
    for (int i = 0; i < 25; ++i)
        d.epochs.push_back(build(++id, EventType::RunOk, i == 0 ? 83 : 71));
    for (int i = 0; i < 10; ++i)
        d.epochs.push_back(build(++id, EventType::RunOk, 70));
    for (int i = 0; i < 3; ++i)
        d.epochs.push_back(build(++id, EventType::RunAlert, 71));
    for (int i = 0; i < 7; ++i)
        d.epochs.push_back(build(++id, EventType::RunAlert, 70));
    return d;
}

} // namespace oracle
