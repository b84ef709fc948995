#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace nsaf {

/// Linear-phase lowpass prototype of a cosine-modulated filter bank.
/// Length is 2*K*N for overlap factor K.
struct PrototypeFilter {
    std::vector<double> coeffs;
    std::size_t num_subbands = 1;
};

struct PrototypeDesign {
    /// Kaiser stopband attenuation target in dB; sets the window shape.
    double stopband_db = 80.0;
    /// Frequency points in [0, pi/N] used when tuning the cutoff.
    std::size_t tuning_grid = 256;
};

/// Kaiser-windowed sinc prototype of length 2*K*N. The cutoff is tuned near
/// pi/(2N) so that adjacent modulated channels are power complementary.
/// Throws std::invalid_argument for N == 0 or K == 0.
PrototypeFilter design_prototype(std::size_t num_subbands, std::size_t overlap,
                                 const PrototypeDesign& design = {});

/// N analysis filters h_i of common length L. Immutable once built.
class AnalysisBank {
public:
    /// Throws std::invalid_argument when filters is empty or ragged.
    explicit AnalysisBank(std::vector<std::vector<double>> filters);

    /// Single pass-through channel h_0 = [1].
    static AnalysisBank identity();

    std::size_t num_subbands() const noexcept { return filters_.size(); }
    std::size_t length() const noexcept { return filters_.front().size(); }
    std::span<const double> filter(std::size_t i) const { return filters_.at(i); }
    const std::vector<std::vector<double>>& filters() const noexcept { return filters_; }

    /// Squared energy sum_n h_i(n)^2 of channel i.
    double energy(std::size_t i) const;

private:
    std::vector<std::vector<double>> filters_;
};

/// Pseudo-QMF modulation
///   h_i(n) = 2 p(n) cos((pi/N)(i + 1/2)(n - (L-1)/2) + (-1)^i pi/4).
/// For N == 1 the modulation is bypassed and the identity channel returned.
/// Throws std::invalid_argument when the prototype was designed for another N.
AnalysisBank build_analysis_bank(const PrototypeFilter& prototype, std::size_t num_subbands);

/// Convenience: design_prototype + build_analysis_bank.
AnalysisBank make_default_bank(std::size_t num_subbands, std::size_t overlap = 16);

/// |H(e^{jw})|^2 of an FIR filter.
double power_response(std::span<const double> h, double omega);

/// max over a uniform grid on [0, pi] of |sum_i |H_i|^2 - 1|.
double power_complementarity_ripple(const AnalysisBank& bank, std::size_t grid_points = 4096);

/// Plain-text coefficient format: header "N L", then one line per filter
/// with L space-separated decimals.
void write_bank(std::ostream& out, const AnalysisBank& bank);
AnalysisBank read_bank(std::istream& in);
void save_bank(const std::string& path, const AnalysisBank& bank);
AnalysisBank load_bank(const std::string& path);

}  // namespace nsaf
