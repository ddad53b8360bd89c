#pragma once

#include <cstdint>

#include "ttf/estimate.hpp"
#include "ttf/model.hpp"
#include "ttf/params.hpp"
#include "ttf/random.hpp"

namespace ttf {

/// r ~ 1 + Poisson(mu); first kind RunOk with probability p; kinds alternate;
/// dwell ~ Exponential(rate of kind); terminated by Fail. No sensors.
Epoch sample_epoch(const ParamSet& theta, Rng& rng, std::int64_t id = 1);

/// n epochs from Rng(seed), ids 1..n.
Dataset generate_dataset(const ParamSet& theta, int n, std::uint64_t seed);
Dataset generate_dataset(const ParamSet& theta, int n, Rng& rng);

/// Same draws, in the same order, as generate_dataset(theta, n, rng) but only
/// the sufficient statistics are kept. fit_from_stats on the result is
/// bit-identical to fit_mle on the materialized dataset.
SufficientStats sample_stats(const ParamSet& theta, int n, Rng& rng);

} // namespace ttf
