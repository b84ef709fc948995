#include "nsaf/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace nsaf {
namespace {

std::string format_g(double v, int digits) {
    std::array<char, 48> buf{};
    std::snprintf(buf.data(), buf.size(), "%.*g", digits, v);
    return buf.data();
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

// 1, 2 or 5 times a power of ten, at least `raw`.
double nice_step(double raw) {
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double f : {1.0, 2.0, 5.0, 10.0})
        if (f * mag >= raw) return f * mag;
    return 10.0 * mag;
}

}  // namespace

void export_csv(std::ostream& out, const CurveSet& curves) {
    out << "iteration";
    for (const auto& name : curves.names) out << ',' << name;
    out << '\n';
    const std::size_t rows = curves.iterations();
    for (const auto& c : curves.values_db)
        if (c.size() != rows) throw std::invalid_argument("export_csv: curves differ in length");
    for (std::size_t k = 0; k < rows; ++k) {
        out << (k + 1);
        for (const auto& c : curves.values_db) out << ',' << format_g(c[k], 9);
        out << '\n';
    }
}

void export_csv(const std::string& path, const CurveSet& curves) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("export_csv: cannot open '" + path + "' for writing");
    export_csv(out, curves);
    if (!out) throw std::runtime_error("export_csv: write failed for '" + path + "'");
}

void emit_plot(std::ostream& out, const CurveSet& curves, const std::string& title) {
    if (curves.names.empty() || curves.iterations() == 0)
        throw std::invalid_argument("emit_plot: nothing to plot");

    constexpr double width = 800.0;
    constexpr double height = 500.0;
    constexpr double left = 70.0;
    constexpr double right = 170.0;
    constexpr double top = 40.0;
    constexpr double bottom = 50.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    const std::size_t iters = curves.iterations();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& c : curves.values_db)
        for (double v : c) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    lo = std::floor(lo / 10.0) * 10.0;
    hi = std::ceil(hi / 10.0) * 10.0;
    if (hi - lo < 10.0) {
        lo -= 10.0;
        hi += 10.0;
    }
    const double x_max = static_cast<double>(iters);
    auto px = [&](double k) { return left + plot_w * (iters > 1 ? (k - 1.0) / (x_max - 1.0) : 0.5); };
    auto py = [&](double db) { return top + plot_h * (hi - db) / (hi - lo); };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << xml_escape(title) << "</text>\n";

    // Grid and tick labels.
    const double y_step = nice_step((hi - lo) / 8.0);
    out << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (double v = std::ceil(lo / y_step) * y_step; v <= hi + 1e-9; v += y_step)
        out << "<line x1=\"" << left << "\" y1=\"" << format_g(py(v), 7) << "\" x2=\"" << left + plot_w << "\" y2=\""
            << format_g(py(v), 7) << "\"/>\n";
    out << "</g>\n";
    for (double v = std::ceil(lo / y_step) * y_step; v <= hi + 1e-9; v += y_step)
        out << "<text x=\"" << left - 6 << "\" y=\"" << format_g(py(v) + 4, 7) << "\" text-anchor=\"end\">"
            << format_g(v, 6) << "</text>\n";
    const double x_step = nice_step(std::max(1.0, x_max / 6.0));
    for (double k = x_step; k <= x_max + 1e-9; k += x_step)
        out << "<text x=\"" << format_g(px(k), 7) << "\" y=\"" << top + plot_h + 18
            << "\" text-anchor=\"middle\">" << format_g(k, 9) << "</text>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\">Iteration k</text>\n";
    out << "<text x=\"18\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << top + plot_h / 2 << ")\">NMSD (dB)</text>\n";

    // At most ~2000 vertices per curve.
    const std::size_t stride = std::max<std::size_t>(1, iters / 2000);
    for (std::size_t a = 0; a < curves.values_db.size(); ++a) {
        const auto& c = curves.values_db[a];
        const char* colour = kPalette[a % kPalette.size()];
        out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < iters; k += stride) {
            if (k) out << ' ';
            out << format_g(px(static_cast<double>(k + 1)), 7) << ',' << format_g(py(c[k]), 7);
        }
        if ((iters - 1) % stride != 0)
            out << ' ' << format_g(px(x_max), 7) << ',' << format_g(py(c[iters - 1]), 7);
        out << "\"/>\n";

        const double ly = top + 10.0 + 20.0 * static_cast<double>(a);
        const double lx = left + plot_w + 12.0;
        out << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24 << "\" y2=\"" << ly << "\" stroke=\""
            << colour << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << lx + 30 << "\" y=\"" << ly + 4 << "\">" << xml_escape(curves.names[a]) << "</text>\n";
    }
    out << "</svg>\n";
}

void emit_plot(const std::string& path, const CurveSet& curves, const std::string& title) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_plot: cannot open '" + path + "' for writing");
    emit_plot(out, curves, title);
    if (!out) throw std::runtime_error("emit_plot: write failed for '" + path + "'");
}

}  // namespace nsaf
