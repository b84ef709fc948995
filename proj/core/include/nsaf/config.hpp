#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nsaf/adaptive.hpp"

namespace nsaf {

enum class InputKind { ar1, wgn, wav };

struct InputSpec {
    InputKind kind = InputKind::ar1;
    double pole = 0.95;
    /// AR(1) innovation variance; defaults to 1 - pole^2 (unit output variance).
    std::optional<double> innovation_variance;
    /// White-noise variance for InputKind::wgn.
    double variance = 1.0;
    /// WAV file for InputKind::wav.
    std::string path;
};

enum class AlgorithmKind { nsaf, josr, nlms, jo_nlms };

struct AlgorithmSpec {
    std::string name;
    AlgorithmKind kind = AlgorithmKind::josr;
    double mu = 1.0;
    /// Absolute regularization.
    double delta = 0.0;
    /// If set, delta = delta_input_var * (input power), overriding `delta`.
    std::optional<double> delta_input_var;
    NoiseSplit noise_split = NoiseSplit::per_subband;

    /// nlms and jo_nlms always run full-band (one subband, identity bank).
    bool full_band() const noexcept { return kind == AlgorithmKind::nlms || kind == AlgorithmKind::jo_nlms; }
};

struct ExperimentConfig {
    InputSpec input;
    /// Full-band samples per run. 0 with a WAV input means "whole file".
    std::size_t total_samples = 0;
    std::size_t taps = 512;       ///< M
    std::size_t subbands = 8;     ///< N
    std::size_t overlap = 16;     ///< prototype overlap factor K
    double snr_db = 30.0;         ///< +inf for noiseless
    double echo_decay = 0.01;
    /// Seed of the echo path (shared by every run). Defaults to base_seed.
    std::optional<std::uint64_t> path_seed;
    std::vector<AlgorithmSpec> algorithms;
    /// Full-band sample where w_o flips to -w_o.
    std::optional<std::size_t> change_at;
    /// Flip at the middle of the run (resolved once the run length is known).
    bool change_at_middle = false;
    std::size_t runs = 1;
    std::uint64_t base_seed = 1;
    /// Worker threads for Monte-Carlo runs; 0 picks hardware concurrency.
    std::size_t threads = 0;
    std::string out_csv;
    std::string out_svg;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
    /// WAV inputs are a single fixed realization.
    std::size_t effective_runs() const noexcept { return input.kind == InputKind::wav ? 1 : runs; }
};

/// Middle of a run of `total_samples`, rounded down to a multiple of N.
std::size_t middle_change_sample(std::size_t total_samples, std::size_t subbands);

/// Parses the JSON experiment description. Unknown keys are rejected.
/// Throws std::invalid_argument on schema violations.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

const char* to_string(AlgorithmKind kind) noexcept;

}  // namespace nsaf
