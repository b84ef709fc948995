#include "nsaf/rng.hpp"

#include <cmath>

namespace nsaf {

RngSeed derive_seed(RngSeed seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed.value + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return RngSeed{z ^ (z >> 31)};
}

double GaussianSource::uniform_open() {
    // 53 random bits -> [0, 1) -> [-1, 1)
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

double GaussianSource::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double x = 0.0;
    double y = 0.0;
    double s = 0.0;
    do {
        x = uniform_open();
        y = uniform_open();
        s = x * x + y * y;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = y * scale;
    has_spare_ = true;
    return x * scale;
}

}  // namespace nsaf
