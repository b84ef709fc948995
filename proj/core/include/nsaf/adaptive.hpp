#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsaf/decomposer.hpp"

namespace nsaf {

/// Fixed step size and regularization of the standard NSAF update.
struct NsafConfig {
    double mu = 1.0;
    double delta = 0.0;

    /// Throws std::invalid_argument unless mu > 0 and delta >= 0.
    void validate() const;
};

/// Per-frame diagnostics shared by both algorithms.
struct StepReport {
    std::vector<double> errors;  ///< e_{i,D}(k)
    std::vector<double> gains;   ///< pi_i(k) for JOSR, mu/(delta + |u_i|^2) for NSAF

    // JOSR only.
    std::optional<double> g;            ///< MSD(k-1) + M sigma_q^2(k-1)
    std::optional<double> msd;          ///< MSD(k) after the update
    std::optional<double> contraction;  ///< 1 - sum_i pi_i sigma_u_i^2
    /// Subbands whose gain denominator vanished and were skipped.
    std::size_t skipped_subbands = 0;
};

/// Raised when delta = 0 meets a zero-energy regressor.
class DivisionHazard : public std::domain_error {
public:
    explicit DivisionHazard(std::size_t subband)
        : std::domain_error("NSAF: delta = 0 and subband " + std::to_string(subband) +
                            " regressor has zero energy"),
          subband_(subband) {}
    std::size_t subband() const noexcept { return subband_; }

private:
    std::size_t subband_;
};

/// sigma_u_i^2 estimate u^T u / M.
double estimate_subband_variance(std::span<const double> regressor);

/// sigma_q^2 estimate |w_now - w_prev|^2 / M. Throws std::invalid_argument on
/// length mismatch or empty vectors.
double estimate_sigma_q(std::span<const double> w_now, std::span<const double> w_prev);

/// Standard NSAF:
///   w(k) = w(k-1) + mu sum_i e_{i,D}(k) u_i(k) / (delta + |u_i(k)|^2).
/// With N = 1 and the identity bank this is NLMS.
class Nsaf {
public:
    Nsaf(std::size_t taps, std::size_t num_subbands, NsafConfig config);

    StepReport step(const SubbandFrame& frame);
    void step(const SubbandFrame& frame, StepReport& report);

    std::span<const double> weights() const noexcept { return weights_; }
    const NsafConfig& config() const noexcept { return config_; }
    std::size_t taps() const noexcept { return weights_.size(); }
    std::size_t num_subbands() const noexcept { return num_subbands_; }

private:
    std::vector<double> weights_;
    std::size_t num_subbands_;
    NsafConfig config_;
    std::vector<double> scratch_;
};

/// How the full-band noise variance enters the JOSR gain denominator.
enum class NoiseSplit {
    per_subband,  ///< M sigma_eta^2 / N (subband noise variance)
    full_band,    ///< M sigma_eta^2 as printed in the algorithm summary table
};

/// Joint-optimization step size and regularization NSAF. Carries no mu or
/// delta; both are absorbed into the per-subband gains
///   pi_i(k) = g(k) / ((M+2) sigma_u_i^2(k) g(k) + M sigma_eta_i^2),
///   g(k)    = MSD(k-1) + M sigma_q^2(k-1).
/// Starts from w(0) = 0, MSD(0) = 1, M sigma_q^2(0) = 0. With N = 1 this is
/// JO-NLMS.
class Josr {
public:
    /// Throws std::invalid_argument for taps == 0, num_subbands == 0 or a
    /// negative noise variance.
    Josr(std::size_t taps, std::size_t num_subbands, double noise_variance,
         NoiseSplit split = NoiseSplit::per_subband);

    StepReport step(const SubbandFrame& frame);
    void step(const SubbandFrame& frame, StepReport& report);

    std::span<const double> weights() const noexcept { return weights_; }
    double msd() const noexcept { return msd_; }
    double m_sigma_q2() const noexcept { return m_sigma_q2_; }
    double noise_variance_subband() const noexcept { return noise_variance_subband_; }
    std::size_t taps() const noexcept { return weights_.size(); }
    std::size_t num_subbands() const noexcept { return num_subbands_; }

private:
    std::vector<double> weights_;
    std::size_t num_subbands_;
    double msd_ = 1.0;
    double m_sigma_q2_ = 0.0;
    double noise_variance_subband_;
    std::vector<double> increment_;
};

/// One weight per line, 17 significant digits.
void write_weights(std::ostream& out, std::span<const double> weights);
std::vector<double> read_weights(std::istream& in);

}  // namespace nsaf
