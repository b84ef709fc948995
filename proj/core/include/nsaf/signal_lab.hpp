#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsaf/rng.hpp"

namespace nsaf {

struct SignalBuffer {
    std::vector<double> samples;
    std::optional<double> sample_rate;

    std::size_t size() const noexcept { return samples.size(); }
    /// Mean of x^2 over the buffer (0 for an empty buffer).
    double power() const noexcept;
};

/// Unknown system w_o. Always non-empty and not all-zero.
class EchoPath {
public:
    /// Throws std::invalid_argument for an empty, all-zero or non-finite vector.
    explicit EchoPath(std::vector<double> taps);

    std::size_t size() const noexcept { return taps_.size(); }
    std::span<const double> taps() const noexcept { return taps_; }
    double operator[](std::size_t j) const { return taps_[j]; }
    double energy() const noexcept;
    EchoPath negated() const;

private:
    std::vector<double> taps_;
};

/// A path that may switch abruptly from w_o to -w_o at `change_sample`.
struct PathSchedule {
    EchoPath path;
    std::optional<std::size_t> change_sample;

    bool negated_at(std::size_t n) const noexcept { return change_sample && n >= *change_sample; }
    /// Sign applied to w_o at full-band sample n.
    double sign_at(std::size_t n) const noexcept { return negated_at(n) ? -1.0 : 1.0; }
};

struct SystemOutput {
    std::vector<double> desired;
    /// sigma_eta^2, computed from the clean-echo power and the requested SNR.
    double noise_variance = 0.0;
};

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

/// x(n) = pole x(n-1) + v(n), v ~ N(0, innovation_variance), x(-1) = 0.
/// Throws std::invalid_argument for |pole| >= 1 or innovation_variance <= 0.
SignalBuffer gen_ar1(double pole, std::size_t length, double innovation_variance, RngSeed seed);

/// i.i.d. N(0, variance). Throws std::invalid_argument for variance < 0.
SignalBuffer gen_wgn(double variance, std::size_t length, RngSeed seed);

/// Gaussian taps under an exp(-decay*j) envelope, scaled to unit energy.
/// Throws std::invalid_argument for M == 0 or decay <= 0.
EchoPath make_echo_path(std::size_t taps, double decay, RngSeed seed);

/// Schedule that uses w_o before `change_sample` and -w_o from it on.
PathSchedule negate_path_at(const EchoPath& path, std::size_t change_sample);

/// d(n) = sum_j w(j) u(n-j) + eta(n) with u(n) = 0 for n < 0, and
/// sigma_eta^2 = mean(clean^2) * 10^(-snr_db/10). Pass kNoiseless for a
/// noise-free output.
/// Throws std::invalid_argument for an empty input, a change_sample outside
/// the input, or a zero-power clean signal with finite SNR.
SystemOutput system_response(const PathSchedule& schedule, const SignalBuffer& input, double snr_db,
                             RngSeed seed);
SystemOutput system_response(const EchoPath& path, const SignalBuffer& input, double snr_db, RngSeed seed);

/// One value per line, 17 significant digits.
void write_samples(std::ostream& out, std::span<const double> samples);

/// Errors raised by load_wav, one code per failure class.
class WavError : public std::runtime_error {
public:
    enum class Code { io, not_riff_wave, unsupported_encoding, unsupported_channels, unsupported_bit_depth, truncated };
    WavError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Code code() const noexcept { return code_; }

private:
    Code code_;
};

/// Reads RIFF/WAVE, PCM (format 1), mono, 16-bit little-endian.
/// Samples are scaled by 1/32768.
SignalBuffer load_wav(const std::string& path);

/// Writes the buffer as mono 16-bit PCM (clipped to [-1, 1 - 2^-15]).
void save_wav(const std::string& path, const SignalBuffer& buffer, unsigned sample_rate = 8000);

}  // namespace nsaf
