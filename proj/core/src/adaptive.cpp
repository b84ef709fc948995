#include "nsaf/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace nsaf {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * b[j];
    return acc;
}

void check_frame(const SubbandFrame& frame, std::size_t taps, std::size_t num_subbands) {
    if (frame.desired.size() != num_subbands || frame.regressors.size() != num_subbands)
        throw std::invalid_argument("frame has " + std::to_string(frame.desired.size()) +
                                    " subbands, filter expects " + std::to_string(num_subbands));
    for (const auto& u : frame.regressors)
        if (u.size() != taps)
            throw std::invalid_argument("frame regressor length " + std::to_string(u.size()) +
                                        " does not match M=" + std::to_string(taps));
}

}  // namespace

void NsafConfig::validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("NSAF: mu must be > 0");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("NSAF: delta must be >= 0");
}

double estimate_subband_variance(std::span<const double> regressor) {
    if (regressor.empty()) throw std::invalid_argument("estimate_subband_variance: empty regressor");
    return dot(regressor, regressor) / static_cast<double>(regressor.size());
}

double estimate_sigma_q(std::span<const double> w_now, std::span<const double> w_prev) {
    if (w_now.size() != w_prev.size())
        throw std::invalid_argument("estimate_sigma_q: weight vectors differ in length");
    if (w_now.empty()) throw std::invalid_argument("estimate_sigma_q: empty weight vectors");
    double acc = 0.0;
    for (std::size_t j = 0; j < w_now.size(); ++j) {
        const double diff = w_now[j] - w_prev[j];
        acc += diff * diff;
    }
    return acc / static_cast<double>(w_now.size());
}

// ---------------------------------------------------------------------------

Nsaf::Nsaf(std::size_t taps, std::size_t num_subbands, NsafConfig config)
    : weights_(taps, 0.0), num_subbands_(num_subbands), config_(config) {
    if (taps == 0) throw std::invalid_argument("NSAF: M must be >= 1");
    if (num_subbands == 0) throw std::invalid_argument("NSAF: N must be >= 1");
    config_.validate();
}

StepReport Nsaf::step(const SubbandFrame& frame) {
    StepReport report;
    step(frame, report);
    return report;
}

void Nsaf::step(const SubbandFrame& frame, StepReport& report) {
    check_frame(frame, weights_.size(), num_subbands_);
    report.errors.resize(num_subbands_);
    report.gains.resize(num_subbands_);
    report.g.reset();
    report.msd.reset();
    report.contraction.reset();
    report.skipped_subbands = 0;

    // All errors use w(k-1); the update is applied afterwards.
    for (std::size_t i = 0; i < num_subbands_; ++i) {
        const auto& u = frame.regressors[i];
        const double energy = dot(u, u);
        const double denom = config_.delta + energy;
        if (denom == 0.0) throw DivisionHazard(i);
        report.errors[i] = frame.desired[i] - dot(u, weights_);
        report.gains[i] = config_.mu / denom;
    }
    for (std::size_t i = 0; i < num_subbands_; ++i) {
        const double scale = report.gains[i] * report.errors[i];
        const auto& u = frame.regressors[i];
        for (std::size_t j = 0; j < weights_.size(); ++j) weights_[j] += scale * u[j];
    }
}

// ---------------------------------------------------------------------------

Josr::Josr(std::size_t taps, std::size_t num_subbands, double noise_variance, NoiseSplit split)
    : weights_(taps, 0.0), num_subbands_(num_subbands), increment_(taps, 0.0) {
    if (taps == 0) throw std::invalid_argument("JOSR: M must be >= 1");
    if (num_subbands == 0) throw std::invalid_argument("JOSR: N must be >= 1");
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
        throw std::invalid_argument("JOSR: noise variance must be finite and >= 0");
    noise_variance_subband_ =
        split == NoiseSplit::per_subband ? noise_variance / static_cast<double>(num_subbands) : noise_variance;
}

StepReport Josr::step(const SubbandFrame& frame) {
    StepReport report;
    step(frame, report);
    return report;
}

void Josr::step(const SubbandFrame& frame, StepReport& report) {
    const std::size_t taps = weights_.size();
    check_frame(frame, taps, num_subbands_);
    report.errors.resize(num_subbands_);
    report.gains.resize(num_subbands_);
    report.skipped_subbands = 0;

    const double m = static_cast<double>(taps);
    const double g = msd_ + m_sigma_q2_;
    const double noise_term = m * noise_variance_subband_;

    double gain_power = 0.0;  // sum_i pi_i sigma_u_i^2
    std::fill(increment_.begin(), increment_.end(), 0.0);
    for (std::size_t i = 0; i < num_subbands_; ++i) {
        const auto& u = frame.regressors[i];
        const double error = frame.desired[i] - dot(u, weights_);
        const double sigma_u2 = dot(u, u) / m;
        const double denom = (m + 2.0) * sigma_u2 * g + noise_term;
        double gain = 0.0;
        if (denom > 0.0) {
            gain = g / denom;
        } else {
            ++report.skipped_subbands;
        }
        report.errors[i] = error;
        report.gains[i] = gain;
        gain_power += gain * sigma_u2;
        const double scale = gain * error;
        for (std::size_t j = 0; j < taps; ++j) increment_[j] += scale * u[j];
    }

    double step_energy = 0.0;
    for (std::size_t j = 0; j < taps; ++j) {
        weights_[j] += increment_[j];
        step_energy += increment_[j] * increment_[j];
    }

    const double contraction = 1.0 - gain_power;
    msd_ = std::max(0.0, contraction * g);
    m_sigma_q2_ = step_energy;

    report.g = g;
    report.msd = msd_;
    report.contraction = contraction;
}

// ---------------------------------------------------------------------------

void write_weights(std::ostream& out, std::span<const double> weights) {
    const auto old = out.precision(17);
    for (double w : weights) out << w << '\n';
    out.precision(old);
}

std::vector<double> read_weights(std::istream& in) {
    std::vector<double> w;
    double x = 0.0;
    while (in >> x) w.push_back(x);
    if (!in.eof()) throw std::runtime_error("read_weights: malformed value after entry " + std::to_string(w.size()));
    return w;
}

}  // namespace nsaf
