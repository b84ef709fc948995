#include "nsaf/decomposer.hpp"

#include <cmath>
#include <stdexcept>

namespace nsaf {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = a[0] * b[0];
    for (std::size_t j = 1; j < a.size(); ++j) acc += a[j] * b[j];
    return acc;
}

}  // namespace

SubbandDecomposer::SubbandDecomposer(AnalysisBank bank, std::size_t taps)
    : bank_(std::move(bank)),
      taps_(taps),
      u_history_(bank_.length()),
      d_history_(bank_.length()) {
    if (taps_ == 0) throw std::invalid_argument("SubbandDecomposer: M must be >= 1");
    regressor_lines_.reserve(bank_.num_subbands());
    for (std::size_t i = 0; i < bank_.num_subbands(); ++i) regressor_lines_.emplace_back(taps_);
}

bool SubbandDecomposer::push_samples(double u, double d, SubbandFrame& out) {
    if (!std::isfinite(u) || !std::isfinite(d))
        throw std::invalid_argument("SubbandDecomposer: non-finite sample at n=" + std::to_string(samples_));

    const std::size_t n_sub = bank_.num_subbands();
    u_history_.push(u);
    d_history_.push(d);
    const auto u_window = u_history_.window();
    for (std::size_t i = 0; i < n_sub; ++i) regressor_lines_[i].push(dot(bank_.filter(i), u_window));
    ++samples_;

    if (samples_ % n_sub != 0) return false;

    out.k = frames_++;
    out.regressors.resize(n_sub);
    out.desired.resize(n_sub);
    const auto d_window = d_history_.window();
    for (std::size_t i = 0; i < n_sub; ++i) {
        const auto line = regressor_lines_[i].window();
        out.regressors[i].assign(line.begin(), line.end());
        out.desired[i] = dot(bank_.filter(i), d_window);
    }
    return true;
}

std::optional<SubbandFrame> SubbandDecomposer::push_samples(double u, double d) {
    SubbandFrame frame;
    if (push_samples(u, d, frame)) return frame;
    return std::nullopt;
}

}  // namespace nsaf
