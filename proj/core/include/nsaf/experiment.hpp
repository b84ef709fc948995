#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nsaf/config.hpp"
#include "nsaf/signal_lab.hpp"

namespace nsaf {

/// Lowest NMSD reported; deviations below 1e-30 are floored to this.
inline constexpr double kNmsdFloorDb = -300.0;

/// 10 log10(|w_ref - w|^2 / |w_ref|^2) in dB.
/// Throws std::invalid_argument on a length mismatch.
double nmsd(const EchoPath& reference, std::span<const double> w);

/// Same as nmsd() in linear units, with the reference scaled by `sign`.
double normalized_deviation(const EchoPath& reference, double sign, std::span<const double> w);

double to_db(double linear) noexcept;

/// Per-iteration internal state of a jointly optimized filter.
struct JosrTrace {
    std::vector<double> msd;          ///< MSD(k) state
    std::vector<double> contraction;  ///< 1 - sum_i pi_i sigma_u_i^2
    std::vector<double> m_sigma_q2;   ///< M sigma_q^2(k)
};

/// One realization. Curves are indexed by decimated iteration k = 1..K
/// (one entry per N full-band samples).
struct RunResult {
    std::vector<std::string> names;
    /// Linear normalized deviation |w_o - w(k)|^2 / |w_o|^2 per algorithm.
    std::vector<std::vector<double>> deviation;
    /// Filled for josr / jo_nlms entries when traces are requested.
    std::vector<std::optional<JosrTrace>> traces;
    std::size_t subbands = 1;
    std::optional<std::size_t> change_iteration;  ///< first k judged against -w_o (0-based)

    std::size_t iterations() const noexcept { return deviation.empty() ? 0 : deviation.front().size(); }
    std::vector<double> nmsd_db(std::size_t algorithm) const;
};

/// Ensemble mean (linear domain) across Monte-Carlo runs.
struct MonteCarloResult {
    std::vector<std::string> names;
    std::vector<std::vector<double>> mean_deviation;
    std::size_t runs = 0;
    std::size_t subbands = 1;
    std::optional<std::size_t> change_iteration;
    ExperimentConfig config;

    std::size_t iterations() const noexcept { return mean_deviation.empty() ? 0 : mean_deviation.front().size(); }
    std::vector<double> nmsd_db(std::size_t algorithm) const;
    std::size_t index_of(const std::string& name) const;
};

struct RunOptions {
    bool record_traces = false;
};

/// Echo path used by every run of `config`.
EchoPath experiment_path(const ExperimentConfig& config);

/// Input realization for `seed` (or the WAV file).
SignalBuffer experiment_input(const ExperimentConfig& config, RngSeed seed);

/// Generates signals for `seed`, decomposes them once, and advances every
/// configured algorithm on the same frames. Full-band algorithms (nlms,
/// jo_nlms) update every sample and are sampled every N samples so all
/// curves share one time axis.
RunResult run_single(const ExperimentConfig& config, RngSeed seed, const RunOptions& options = {});

/// Seeds base_seed .. base_seed + runs - 1. Runs may execute concurrently;
/// the mean is accumulated in seed order so results are bit-stable.
MonteCarloResult run_monte_carlo(const ExperimentConfig& config);

/// First iteration (0-based) at which the trailing `window`-iteration mean
/// of `curve_db` is at or below `threshold_db`.
std::optional<std::size_t> iterations_to_reach(std::span<const double> curve_db, double threshold_db,
                                               std::size_t window = 50);

/// Mean of the last 10% of curve_db[0, end) (end defaults to the whole curve).
double terminal_nmsd(std::span<const double> curve_db, std::optional<std::size_t> end = std::nullopt);

/// Named dB curves sharing an iteration axis; what CSV and SVG writers take.
struct CurveSet {
    std::vector<std::string> names;
    std::vector<std::vector<double>> values_db;

    std::size_t iterations() const noexcept { return values_db.empty() ? 0 : values_db.front().size(); }
};

CurveSet to_curves(const MonteCarloResult& result);
CurveSet to_curves(const RunResult& result);

/// Closed-form MSD predictions for every configured algorithm (NMSD, dB),
/// on the same iteration axis as run_single. Fixed-step filters follow the
/// hbar/phi recursion; jointly optimized filters follow the beta recursion
/// with sigma_q^2 = 0. A path flip adds 4 |w_o|^2 to the predicted MSD.
CurveSet predict(const ExperimentConfig& config);

}  // namespace nsaf
