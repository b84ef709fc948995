#include "nsaf/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace nsaf::theory {
namespace {

// Sums shared by hbar, phi and both optimal step sizes.
struct Moments {
    double linear = 0.0;     // sum s_i / D_i
    double quadratic = 0.0;  // sum (M+2) s_i^2 / D_i^2
    double noise = 0.0;      // sum M s_i sigma_eta_i^2 / D_i^2
};

Moments moments(const SubbandStats& stats, double delta) {
    stats.validate();
    if (!(delta >= 0.0)) throw std::invalid_argument("theory: delta must be >= 0");
    const double m = static_cast<double>(stats.taps);
    Moments out;
    for (double s : stats.sigma_u2) {
        const double denom = delta + m * s;
        if (denom == 0.0) throw std::domain_error("theory: delta + M sigma_u_i^2 is zero");
        const double denom2 = denom * denom;
        out.linear += s / denom;
        out.quadratic += (m + 2.0) * s * s / denom2;
        out.noise += m * s * stats.sigma_eta2_subband / denom2;
    }
    return out;
}

}  // namespace

void SubbandStats::validate() const {
    if (sigma_u2.empty()) throw std::invalid_argument("SubbandStats: no subbands");
    if (taps == 0) throw std::invalid_argument("SubbandStats: M must be >= 1");
    for (double s : sigma_u2)
        if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("SubbandStats: bad sigma_u_i^2");
    if (!(sigma_eta2_subband >= 0.0) || !std::isfinite(sigma_eta2_subband))
        throw std::invalid_argument("SubbandStats: bad sigma_eta_i^2");
    if (!(sigma_q2 >= 0.0) || !std::isfinite(sigma_q2)) throw std::invalid_argument("SubbandStats: bad sigma_q^2");
}

double hbar(const SubbandStats& stats, const StepParams& params) {
    const Moments mo = moments(stats, params.delta);
    return 1.0 - 2.0 * params.mu * mo.linear + params.mu * params.mu * mo.quadratic;
}

double phi(const SubbandStats& stats, const StepParams& params) {
    const Moments mo = moments(stats, params.delta);
    const double h = 1.0 - 2.0 * params.mu * mo.linear + params.mu * params.mu * mo.quadratic;
    return h * static_cast<double>(stats.taps) * stats.sigma_q2 + params.mu * params.mu * mo.noise;
}

MsdTrajectory msd_recursion(const SubbandStats& stats, const StepParams& params, double msd0, std::size_t steps) {
    if (!(msd0 >= 0.0)) throw std::invalid_argument("msd_recursion: MSD(0) must be >= 0");
    const double h = hbar(stats, params);
    const double p = phi(stats, params);
    MsdTrajectory out;
    out.values.reserve(steps + 1);
    out.values.push_back(msd0);
    double msd = msd0;
    for (std::size_t k = 0; k < steps; ++k) {
        msd = h * msd + p;
        out.values.push_back(msd);
    }
    return out;
}

MsdTrajectory josr_msd_recursion(const SubbandStats& stats, double msd0, std::size_t steps) {
    if (!(msd0 >= 0.0)) throw std::invalid_argument("josr_msd_recursion: MSD(0) must be >= 0");
    stats.validate();
    const double drift = static_cast<double>(stats.taps) * stats.sigma_q2;
    MsdTrajectory out;
    out.values.reserve(steps + 1);
    out.values.push_back(msd0);
    double msd = msd0;
    for (std::size_t k = 0; k < steps; ++k) {
        msd = beta(stats, msd) * (msd + drift);
        out.values.push_back(msd);
    }
    return out;
}

double optimal_step_convergence(const SubbandStats& stats, double delta) {
    const Moments mo = moments(stats, delta);
    if (mo.quadratic == 0.0) throw std::domain_error("optimal_step_convergence: all subband variances are zero");
    return mo.linear / mo.quadratic;
}

StepInterval stability_range(const SubbandStats& stats, double delta) {
    return StepInterval{0.0, 2.0 * optimal_step_convergence(stats, delta)};
}

double optimal_step_misadjustment(const SubbandStats& stats, double delta) {
    const Moments mo = moments(stats, delta);
    if (stats.sigma_q2 == 0.0) return 0.0;
    // d phi / d mu = 0  =>  mu = sq * linear / (sq * quadratic + noise / M)
    const double m = static_cast<double>(stats.taps);
    const double denom = stats.sigma_q2 * mo.quadratic + mo.noise / m;
    if (denom == 0.0) throw std::domain_error("optimal_step_misadjustment: degenerate statistics");
    return stats.sigma_q2 * mo.linear / denom;
}

double beta(const SubbandStats& stats, double msd_prev) {
    stats.validate();
    if (!(msd_prev >= 0.0)) throw std::invalid_argument("beta: MSD(k-1) must be >= 0");
    const double m = static_cast<double>(stats.taps);
    double sum = 0.0;
    for (double s : stats.sigma_u2) {
        const double excess = msd_prev * s + m * stats.sigma_q2 * s;
        const double denom = (m + 2.0) * excess + m * stats.sigma_eta2_subband;
        if (denom == 0.0) continue;  // no excess error and no noise: zero gain
        sum += excess / denom;
    }
    return 1.0 - sum;
}

double sigma_q_stability_bound(double beta_k, double beta_max, std::size_t taps, double msd0, std::size_t k) {
    if (k == 0) throw std::invalid_argument("sigma_q_stability_bound: k must be >= 1");
    if (!(beta_k > 0.0 && beta_k <= 1.0)) throw std::invalid_argument("sigma_q_stability_bound: beta(k) outside (0, 1]");
    if (!(beta_max >= 0.0)) throw std::invalid_argument("sigma_q_stability_bound: beta_max must be >= 0");
    if (taps == 0) throw std::invalid_argument("sigma_q_stability_bound: M must be >= 1");
    return (1.0 - beta_k) / (static_cast<double>(taps) * beta_k) *
           std::pow(beta_max, static_cast<double>(k - 1)) * msd0;
}

double steady_state_bound(double sigma_q2, std::size_t taps, double beta_max) {
    if (!(beta_max >= 0.0 && beta_max < 1.0)) throw std::invalid_argument("steady_state_bound: beta_max must lie in [0, 1)");
    if (!(sigma_q2 >= 0.0)) throw std::invalid_argument("steady_state_bound: sigma_q^2 must be >= 0");
    return static_cast<double>(taps) * sigma_q2 * beta_max / (1.0 - beta_max);
}

std::vector<double> subband_variances(const AnalysisBank& bank, const std::function<double(std::size_t)>& autocorr) {
    const std::size_t len = bank.length();
    std::vector<double> r(len);
    for (std::size_t lag = 0; lag < len; ++lag) r[lag] = autocorr(lag);
    std::vector<double> out(bank.num_subbands());
    for (std::size_t i = 0; i < bank.num_subbands(); ++i) {
        const auto h = bank.filter(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
            acc += h[j] * h[j] * r[0];
            for (std::size_t l = j + 1; l < len; ++l) acc += 2.0 * h[j] * h[l] * r[l - j];
        }
        out[i] = acc;
    }
    return out;
}

}  // namespace nsaf::theory
