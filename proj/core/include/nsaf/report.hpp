#pragma once

#include <iosfwd>
#include <string>

#include "nsaf/experiment.hpp"

namespace nsaf {

/// Header `iteration,<name1>,<name2>,...`, then one row per decimated
/// iteration k = 1..K. Values use 9 significant digits; lines end in LF.
void export_csv(std::ostream& out, const CurveSet& curves);
/// Throws std::runtime_error when the path cannot be written.
void export_csv(const std::string& path, const CurveSet& curves);

/// Self-contained SVG line chart: one polyline per curve, iteration on the
/// x axis, NMSD (dB) on the y axis, legend from the curve names.
/// Throws std::invalid_argument for an empty curve set.
void emit_plot(std::ostream& out, const CurveSet& curves, const std::string& title = "NMSD");
void emit_plot(const std::string& path, const CurveSet& curves, const std::string& title = "NMSD");

}  // namespace nsaf
