#pragma once

#include "wpcurve/reports.hpp"

#include <span>
#include <string>

namespace wpc {

/// Static SVG renderings of the report CSVs. Deterministic output: fixed
/// canvas, fixed palette, round-trippable number formatting, no timestamps.

/// Scatter of (x, y) points colored by a third value (light blue = low,
/// dark red = high), e.g. power vs wind speed shaded by epistemic std.
void writeScatterSvg(const std::string& path, const std::string& title,
                     const std::string& xLabel, const std::string& yLabel,
                     std::span<const double> x, std::span<const double> y,
                     std::span<const double> color, const std::string& colorLabel);

/// Per-bin sample frequency (bars) against mean epistemic std (line).
void writeBinReportSvg(const std::string& path, const BinReport& report);

/// Paired normalized histograms of actual vs predicted power.
void writePowerDistributionSvg(const std::string& path, const PowerDistribution& dist);

/// MAE mean with a +/- std whisker per feature set.
void writeAblationSvg(const std::string& path, const AblationReport& report);

} // namespace wpc
