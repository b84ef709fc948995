#include "nsaf/signal_lab.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace nsaf {

double SignalBuffer::power() const noexcept {
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (double x : samples) acc += x * x;
    return acc / static_cast<double>(samples.size());
}

EchoPath::EchoPath(std::vector<double> taps) : taps_(std::move(taps)) {
    if (taps_.empty()) throw std::invalid_argument("EchoPath: M must be >= 1");
    bool any = false;
    for (double w : taps_) {
        if (!std::isfinite(w)) throw std::invalid_argument("EchoPath: non-finite tap");
        any = any || w != 0.0;
    }
    if (!any) throw std::invalid_argument("EchoPath: all-zero path has no defined NMSD");
}

double EchoPath::energy() const noexcept {
    double e = 0.0;
    for (double w : taps_) e += w * w;
    return e;
}

EchoPath EchoPath::negated() const {
    std::vector<double> neg(taps_.size());
    for (std::size_t j = 0; j < taps_.size(); ++j) neg[j] = -taps_[j];
    return EchoPath(std::move(neg));
}

SignalBuffer gen_ar1(double pole, std::size_t length, double innovation_variance, RngSeed seed) {
    if (!(std::abs(pole) < 1.0)) throw std::invalid_argument("gen_ar1: |pole| must be < 1");
    if (!(innovation_variance > 0.0)) throw std::invalid_argument("gen_ar1: innovation variance must be > 0");
    GaussianSource gauss(seed);
    const double scale = std::sqrt(innovation_variance);
    SignalBuffer out;
    out.samples.resize(length);
    double prev = 0.0;
    for (std::size_t n = 0; n < length; ++n) {
        prev = pole * prev + scale * gauss.next();
        out.samples[n] = prev;
    }
    return out;
}

SignalBuffer gen_wgn(double variance, std::size_t length, RngSeed seed) {
    if (!(variance >= 0.0)) throw std::invalid_argument("gen_wgn: variance must be >= 0");
    GaussianSource gauss(seed);
    const double scale = std::sqrt(variance);
    SignalBuffer out;
    out.samples.resize(length);
    for (auto& x : out.samples) x = scale * gauss.next();
    return out;
}

EchoPath make_echo_path(std::size_t taps, double decay, RngSeed seed) {
    if (taps == 0) throw std::invalid_argument("make_echo_path: M must be >= 1");
    if (!(decay > 0.0)) throw std::invalid_argument("make_echo_path: decay must be > 0");
    GaussianSource gauss(seed);
    std::vector<double> w(taps);
    double energy = 0.0;
    for (std::size_t j = 0; j < taps; ++j) {
        double g = gauss.next();
        while (j == 0 && taps == 1 && g == 0.0) g = gauss.next();
        w[j] = g * std::exp(-decay * static_cast<double>(j));
        energy += w[j] * w[j];
    }
    const double norm = std::sqrt(energy);
    for (auto& x : w) x /= norm;
    return EchoPath(std::move(w));
}

PathSchedule negate_path_at(const EchoPath& path, std::size_t change_sample) {
    return PathSchedule{path, change_sample};
}

SystemOutput system_response(const PathSchedule& schedule, const SignalBuffer& input, double snr_db,
                             RngSeed seed) {
    const auto& u = input.samples;
    if (u.empty()) throw std::invalid_argument("system_response: empty input");
    if (schedule.change_sample && *schedule.change_sample >= u.size())
        throw std::invalid_argument("system_response: change sample " + std::to_string(*schedule.change_sample) +
                                    " outside input of length " + std::to_string(u.size()));
    if (std::isnan(snr_db)) throw std::invalid_argument("system_response: SNR is NaN");

    const auto w = schedule.path.taps();
    SystemOutput out;
    out.desired.resize(u.size());
    double clean_energy = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n) {
        const std::size_t span = std::min(w.size(), n + 1);
        double acc = 0.0;
        for (std::size_t j = 0; j < span; ++j) acc += w[j] * u[n - j];
        acc *= schedule.sign_at(n);
        out.desired[n] = acc;
        clean_energy += acc * acc;
    }

    if (snr_db == kNoiseless) return out;

    const double clean_power = clean_energy / static_cast<double>(u.size());
    if (clean_power == 0.0)
        throw std::invalid_argument("system_response: clean echo has zero power, SNR undefined");
    out.noise_variance = clean_power * std::pow(10.0, -snr_db / 10.0);
    GaussianSource gauss(seed);
    const double scale = std::sqrt(out.noise_variance);
    for (auto& d : out.desired) d += scale * gauss.next();
    return out;
}

SystemOutput system_response(const EchoPath& path, const SignalBuffer& input, double snr_db, RngSeed seed) {
    return system_response(PathSchedule{path, std::nullopt}, input, snr_db, seed);
}

void write_samples(std::ostream& out, std::span<const double> samples) {
    const auto old = out.precision(17);
    for (double x : samples) out << x << '\n';
    out.precision(old);
}

}  // namespace nsaf
