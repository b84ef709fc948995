#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "nsaf/filterbank.hpp"

namespace nsaf::theory {

/// Second-order statistics that drive every closed-form expression below.
struct SubbandStats {
    std::vector<double> sigma_u2;     ///< sigma_u_i^2, one per subband
    double sigma_eta2_subband = 0.0;  ///< sigma_eta_i^2 (= sigma_eta^2 / N)
    double sigma_q2 = 0.0;            ///< random-walk variance per tap
    std::size_t taps = 1;             ///< M

    std::size_t num_subbands() const noexcept { return sigma_u2.size(); }
    /// Throws std::invalid_argument on empty/negative/non-finite fields or M == 0.
    void validate() const;
};

struct StepParams {
    double mu = 1.0;
    double delta = 0.0;
};

/// MSD(0), MSD(1), ... (index 0 is the initial value).
struct MsdTrajectory {
    std::vector<double> values;
};

/// Convergence factor
///   1 - 2 mu sum s_i/(delta + M s_i) + mu^2 sum (M+2) s_i^2/(delta + M s_i)^2.
/// Throws std::domain_error if some delta + M s_i is zero.
double hbar(const SubbandStats& stats, const StepParams& params);

/// Misadjustment term
///   hbar M sigma_q^2 + mu^2 sum M s_i sigma_eta_i^2/(delta + M s_i)^2.
double phi(const SubbandStats& stats, const StepParams& params);

/// Iterates MSD(k) = hbar MSD(k-1) + phi with frozen statistics.
MsdTrajectory msd_recursion(const SubbandStats& stats, const StepParams& params, double msd0,
                            std::size_t steps);

/// Closed-form MSD propagation of the jointly optimized update with frozen
/// statistics: MSD(k) = beta(k) (MSD(k-1) + M sigma_q^2).
MsdTrajectory josr_msd_recursion(const SubbandStats& stats, double msd0, std::size_t steps);

/// Step size minimizing hbar:
///   [sum s_i/(delta + M s_i)] / [sum (M+2) s_i^2/(delta + M s_i)^2].
double optimal_step_convergence(const SubbandStats& stats, double delta);

struct StepInterval {
    double lower = 0.0;
    double upper = 0.0;  ///< exclusive
    bool contains(double mu) const noexcept { return mu > lower && mu < upper; }
};

/// Mean-square stability interval (0, 2 mu_opt-con).
StepInterval stability_range(const SubbandStats& stats, double delta);

/// Step size minimizing phi. Zero when sigma_q^2 = 0.
double optimal_step_misadjustment(const SubbandStats& stats, double delta);

/// Contraction factor of the jointly optimized recursion,
///   1 - sum_i (a_i + M sq s_i) / ((M+2)(a_i + M sq s_i) + M sigma_eta_i^2),
/// with a_i = E[e_{a,i}^2] = msd_prev * s_i.
double beta(const SubbandStats& stats, double msd_prev);

/// Right-hand side of the sigma_q^2 stability condition,
///   (1 - beta_k) / (M beta_k) * beta_max^(k-1) * MSD(0).
/// Throws std::invalid_argument for k == 0 or beta_k outside (0, 1].
double sigma_q_stability_bound(double beta_k, double beta_max, std::size_t taps, double msd0, std::size_t k);

/// Steady-state MSD bound M sigma_q^2 beta_max / (1 - beta_max).
/// Throws std::invalid_argument unless 0 <= beta_max < 1.
double steady_state_bound(double sigma_q2, std::size_t taps, double beta_max);

/// Variance of each analysis-bank output for a wide-sense stationary input
/// with autocorrelation r(lag): sum_j sum_l h_i(j) h_i(l) r(|j - l|).
std::vector<double> subband_variances(const AnalysisBank& bank, const std::function<double(std::size_t)>& autocorr);

}  // namespace nsaf::theory
