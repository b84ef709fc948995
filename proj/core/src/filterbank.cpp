#include "nsaf/filterbank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace nsaf {
namespace {

constexpr double kPi = std::numbers::pi;

double kaiser_beta(double attenuation_db) {
    if (attenuation_db > 50.0) return 0.1102 * (attenuation_db - 8.7);
    if (attenuation_db >= 21.0)
        return 0.5842 * std::pow(attenuation_db - 21.0, 0.4) + 0.07886 * (attenuation_db - 21.0);
    return 0.0;
}

// Only the first half is computed; the second half mirrors it so the
// symmetry holds bit-for-bit.
std::vector<double> windowed_sinc(std::size_t length, double cutoff, double beta) {
    std::vector<double> p(length);
    const double centre = 0.5 * static_cast<double>(length - 1);
    const double i0_beta = std::cyl_bessel_i(0.0, beta);
    for (std::size_t n = 0; n < (length + 1) / 2; ++n) {
        const double m = static_cast<double>(n) - centre;
        const double sinc = (m == 0.0) ? cutoff / kPi : std::sin(cutoff * m) / (kPi * m);
        double window = 1.0;
        if (length > 1) {
            const double r = m / centre;
            window = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
        }
        p[n] = sinc * window;
        p[length - 1 - n] = p[n];
    }
    return p;
}

// Zero-phase amplitude of a symmetric filter; |P(e^{jw})| = |amplitude|.
double symmetric_amplitude(std::span<const double> p, double omega) {
    const double centre = 0.5 * static_cast<double>(p.size() - 1);
    double acc = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n)
        acc += p[n] * std::cos(omega * (static_cast<double>(n) - centre));
    return acc;
}

// Worst deviation of |P(w)|^2 + |P(pi/N - w)|^2 from 1 over [0, pi/N].
double complementarity_error(std::span<const double> p, std::size_t num_subbands, std::size_t grid) {
    const double band = kPi / static_cast<double>(num_subbands);
    double worst = 0.0;
    for (std::size_t g = 0; g <= grid; ++g) {
        const double omega = band * static_cast<double>(g) / static_cast<double>(grid);
        const double a = symmetric_amplitude(p, omega);
        const double b = symmetric_amplitude(p, band - omega);
        worst = std::max(worst, std::abs(a * a + b * b - 1.0));
    }
    return worst;
}

}  // namespace

PrototypeFilter design_prototype(std::size_t num_subbands, std::size_t overlap,
                                 const PrototypeDesign& design) {
    if (num_subbands == 0) throw std::invalid_argument("design_prototype: N must be >= 1");
    if (overlap == 0) throw std::invalid_argument("design_prototype: K must be >= 1");
    if (design.tuning_grid == 0) throw std::invalid_argument("design_prototype: empty tuning grid");

    const std::size_t length = 2 * overlap * num_subbands;
    const double beta = kaiser_beta(design.stopband_db);
    const double nominal = kPi / (2.0 * static_cast<double>(num_subbands));
    auto cost = [&](double cutoff) {
        return complementarity_error(windowed_sinc(length, cutoff, beta), num_subbands,
                                     design.tuning_grid);
    };

    // Coarse scan for the basin, then golden-section refinement inside it.
    constexpr int kScan = 64;
    double lo_edge = 0.5 * nominal;
    double hi_edge = 1.5 * nominal;
    double best = nominal;
    double best_cost = std::numeric_limits<double>::infinity();
    const double step = (hi_edge - lo_edge) / kScan;
    for (int s = 0; s <= kScan; ++s) {
        const double c = lo_edge + step * s;
        const double v = cost(c);
        if (v < best_cost) {
            best_cost = v;
            best = c;
        }
    }
    double a = std::max(lo_edge, best - step);
    double b = std::min(hi_edge, best + step);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = cost(x1);
    double f2 = cost(x2);
    for (int it = 0; it < 60 && (b - a) > 1e-12 * nominal; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = cost(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = cost(x2);
        }
    }
    const double refined = (f1 < f2) ? x1 : x2;
    const double cutoff = std::min(f1, f2) < best_cost ? refined : best;

    return PrototypeFilter{windowed_sinc(length, cutoff, beta), num_subbands};
}

AnalysisBank::AnalysisBank(std::vector<std::vector<double>> filters) : filters_(std::move(filters)) {
    if (filters_.empty()) throw std::invalid_argument("AnalysisBank: need at least one filter");
    const std::size_t len = filters_.front().size();
    if (len == 0) throw std::invalid_argument("AnalysisBank: empty filter");
    for (const auto& h : filters_) {
        if (h.size() != len) throw std::invalid_argument("AnalysisBank: filters differ in length");
        for (double c : h)
            if (!std::isfinite(c)) throw std::invalid_argument("AnalysisBank: non-finite coefficient");
    }
}

AnalysisBank AnalysisBank::identity() { return AnalysisBank(std::vector<std::vector<double>>{std::vector<double>{1.0}}); }

double AnalysisBank::energy(std::size_t i) const {
    double e = 0.0;
    for (double c : filters_.at(i)) e += c * c;
    return e;
}

AnalysisBank build_analysis_bank(const PrototypeFilter& prototype, std::size_t num_subbands) {
    if (num_subbands == 0) throw std::invalid_argument("build_analysis_bank: N must be >= 1");
    if (prototype.num_subbands != num_subbands) {
        throw std::invalid_argument("build_analysis_bank: prototype designed for N=" +
                                    std::to_string(prototype.num_subbands) + ", requested N=" +
                                    std::to_string(num_subbands));
    }
    const std::size_t length = prototype.coeffs.size();
    if (length == 0 || length % (2 * num_subbands) != 0)
        throw std::invalid_argument("build_analysis_bank: prototype length must be 2*K*N");
    if (num_subbands == 1) return AnalysisBank::identity();

    const double n_sub = static_cast<double>(num_subbands);
    const double centre = 0.5 * static_cast<double>(length - 1);
    std::vector<std::vector<double>> filters(num_subbands, std::vector<double>(length));
    for (std::size_t i = 0; i < num_subbands; ++i) {
        const double phase = (i % 2 == 0 ? 1.0 : -1.0) * kPi / 4.0;
        const double freq = kPi / n_sub * (static_cast<double>(i) + 0.5);
        for (std::size_t n = 0; n < length; ++n) {
            filters[i][n] = 2.0 * prototype.coeffs[n] *
                            std::cos(freq * (static_cast<double>(n) - centre) + phase);
        }
    }
    return AnalysisBank(std::move(filters));
}

AnalysisBank make_default_bank(std::size_t num_subbands, std::size_t overlap) {
    return build_analysis_bank(design_prototype(num_subbands, overlap), num_subbands);
}

double power_response(std::span<const double> h, double omega) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t n = 0; n < h.size(); ++n) {
        const double arg = omega * static_cast<double>(n);
        re += h[n] * std::cos(arg);
        im -= h[n] * std::sin(arg);
    }
    return re * re + im * im;
}

double power_complementarity_ripple(const AnalysisBank& bank, std::size_t grid_points) {
    if (grid_points < 2) throw std::invalid_argument("power_complementarity_ripple: grid too small");
    double worst = 0.0;
    for (std::size_t g = 0; g < grid_points; ++g) {
        const double omega = kPi * static_cast<double>(g) / static_cast<double>(grid_points - 1);
        double total = 0.0;
        for (std::size_t i = 0; i < bank.num_subbands(); ++i) total += power_response(bank.filter(i), omega);
        worst = std::max(worst, std::abs(total - 1.0));
    }
    return worst;
}

void write_bank(std::ostream& out, const AnalysisBank& bank) {
    out << bank.num_subbands() << ' ' << bank.length() << '\n';
    out << std::setprecision(17);
    for (const auto& h : bank.filters()) {
        for (std::size_t n = 0; n < h.size(); ++n) {
            if (n) out << ' ';
            out << h[n];
        }
        out << '\n';
    }
}

AnalysisBank read_bank(std::istream& in) {
    std::size_t n_sub = 0;
    std::size_t length = 0;
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("read_bank: missing header");
    std::istringstream hs(header);
    if (!(hs >> n_sub >> length) || n_sub == 0 || length == 0)
        throw std::runtime_error("read_bank: malformed header '" + header + "'");

    std::vector<std::vector<double>> filters;
    filters.reserve(n_sub);
    std::string line;
    for (std::size_t i = 0; i < n_sub; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error("read_bank: expected " + std::to_string(n_sub) + " filter lines");
        std::istringstream ls(line);
        std::vector<double> h;
        h.reserve(length);
        double c = 0.0;
        while (ls >> c) h.push_back(c);
        if (!ls.eof() || h.size() != length)
            throw std::runtime_error("read_bank: filter " + std::to_string(i) + " does not have " +
                                     std::to_string(length) + " coefficients");
        filters.push_back(std::move(h));
    }
    return AnalysisBank(std::move(filters));
}

void save_bank(const std::string& path, const AnalysisBank& bank) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_bank(out, bank);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

AnalysisBank load_bank(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_bank(in);
}

}  // namespace nsaf
