#pragma once

#include <cstdint>
#include <random>

namespace ttf {

/// Mixes (seed, index) into an independent 64-bit seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Seedable variate source. The engine is keyed by (seed, stream) so that
/// replicate m of a Monte-Carlo loop can construct its own generator from the
/// replicate counter alone; draws never depend on scheduling.
///
/// The samplers are written out rather than taken from <random> distributions,
/// whose algorithms differ between standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    double exponential(double rate);
    bool bernoulli(double p);
    /// Poisson(mu): sequential inversion below mu = 30, PTRS rejection above.
    std::int64_t poisson(double mu);

    std::mt19937_64& engine() { return engine_; }

  private:
    std::int64_t poisson_inversion(double mu);
    std::int64_t poisson_ptrs(double mu);

    std::mt19937_64 engine_;
};

} // namespace ttf
