#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace ttf {

/// Base-model parameters: dwell rates of the two running states, the
/// shifted-Poisson rate of the event count, and the probability that an epoch
/// opens with RunOk.
struct ParamSet {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double mu = 0.0;
    double p = 0.5;

    friend bool operator==(const ParamSet&, const ParamSet&) = default;
};

/// Throws Error(DomainError) unless lambda1, lambda2 > 0, mu >= 0, 0 <= p <= 1.
void check_domain(const ParamSet& theta);

/// Parameter index in report order (lambda1, lambda2, p, mu).
enum class Param { Lambda1 = 0, Lambda2 = 1, P = 2, Mu = 3 };

inline constexpr std::array<Param, 4> kAllParams{Param::Lambda1, Param::Lambda2, Param::P, Param::Mu};

template <typename T>
using PerParam = std::array<T, 4>;

constexpr std::size_t index(Param p) { return static_cast<std::size_t>(p); }

std::string_view to_string(Param p);

double value_of(const ParamSet& theta, Param p);

} // namespace ttf
