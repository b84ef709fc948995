#pragma once

#include <cstdint>
#include <random>

namespace nsaf {

/// Seed for every stochastic generator. Same seed, same sequence.
struct RngSeed {
    std::uint64_t value = 0;
};

/// Mixes `stream` into `seed` (SplitMix64 finalizer) so that sub-generators
/// of one run draw from decorrelated streams.
RngSeed derive_seed(RngSeed seed, std::uint64_t stream) noexcept;

/// Standard normal draws from mt19937_64 via the Marsaglia polar method.
/// The uniform mapping and transform are spelled out here rather than taken
/// from <random>'s distributions, whose output is implementation-defined,
/// so sequences are identical on every standard library.
class GaussianSource {
public:
    explicit GaussianSource(RngSeed seed) : engine_(seed.value) {}

    double next();

private:
    double uniform_open();  // (-1, 1)

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace nsaf
