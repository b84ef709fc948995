#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nsaf/filterbank.hpp"

namespace nsaf {

/// One decimated iteration k: regressor u_i(k) and desired d_{i,D}(k) for
/// every subband.
struct SubbandFrame {
    std::size_t k = 0;
    std::vector<std::vector<double>> regressors;
    std::vector<double> desired;

    std::size_t num_subbands() const noexcept { return desired.size(); }
    std::size_t taps() const noexcept { return regressors.empty() ? 0 : regressors.front().size(); }
};

/// Splits full-band (u, d) streams through the analysis bank and emits one
/// frame per N pushed samples. Delay lines start at zero.
///
/// Regressor i of frame k holds [u_i(n), u_i(n-1), ..., u_i(n-M+1)] where n
/// is the last pushed sample; consecutive frames therefore overlap in M-N
/// entries shifted by N.
class SubbandDecomposer {
public:
    /// Throws std::invalid_argument for M == 0.
    SubbandDecomposer(AnalysisBank bank, std::size_t taps);

    /// Returns a frame every N-th call, nothing otherwise.
    /// Throws std::invalid_argument on non-finite samples.
    std::optional<SubbandFrame> push_samples(double u, double d);

    /// Allocation-free variant: fills `out` and returns true when a frame is due.
    bool push_samples(double u, double d, SubbandFrame& out);

    std::size_t num_subbands() const noexcept { return bank_.num_subbands(); }
    std::size_t taps() const noexcept { return taps_; }
    std::size_t samples_pushed() const noexcept { return samples_; }
    std::size_t frames_emitted() const noexcept { return frames_; }
    const AnalysisBank& bank() const noexcept { return bank_; }

private:
    // Newest-first window over a doubled ring; window() is always contiguous.
    class DelayLine {
    public:
        explicit DelayLine(std::size_t length) : length_(length), buf_(2 * length, 0.0), head_(0) {}
        void push(double x) {
            head_ = (head_ == 0) ? length_ - 1 : head_ - 1;
            buf_[head_] = x;
            buf_[head_ + length_] = x;
        }
        std::span<const double> window() const { return {buf_.data() + head_, length_}; }

    private:
        std::size_t length_;
        std::vector<double> buf_;
        std::size_t head_;
    };

    AnalysisBank bank_;
    std::size_t taps_;
    DelayLine u_history_;
    DelayLine d_history_;
    std::vector<DelayLine> regressor_lines_;
    std::size_t samples_ = 0;
    std::size_t frames_ = 0;
};

}  // namespace nsaf
