#pragma once

#include "wpcurve/matrix.hpp"
#include "wpcurve/scada.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wpc {

/// One-dimensional regression tasks used by the verification suites.
struct Toy1dTask {
    Matrix x; // n x 1
    std::vector<double> y;
};

/// y = sin(2*pi*x) + Normal(0, (0.05 + 0.10 x)^2), x ~ U(0,1).
/// The input-dependent noise is what the variance head has to recover.
Toy1dTask sineHeteroscedasticTask(std::size_t n, std::uint64_t seed);
double sineNoiseStd(double x);

/// Training inputs drawn from [0, 0.4] and [0.6, 1.0] only; the model never
/// sees the gap in between.
Toy1dTask gapTrainTask(std::size_t n, std::uint64_t seed);

/// Evaluation inputs for the gap experiment: mostly the training lobes plus
/// a thin uniform component over [0,1], so gap bins are occupied but rare.
Toy1dTask gapTestMixture(std::size_t n, std::uint64_t seed);

/// Smooth MM82-shaped reference curve: zero outside [3.5, 20] m/s, logistic
/// ramp reaching 2050 kW at 14.5 m/s, flat at rated beyond.
double analyticNominalPower(double windSpeed);

/// Breakpoint table of the analytic curve at 0.5 m/s spacing, in the
/// (wind_speed_ms, power_kw) CSV schema the evaluator loads.
void writeNominalCurveCsv(const std::string& path);

/// Synthetic SCADA series: Weibull winds, two-lobed direction rose,
/// temperature with a seasonal swing, and power from the analytic curve at a
/// turbulence-shifted effective wind speed plus heteroscedastic noise. The
/// turbulence coupling is the planted signal that makes TI an informative
/// feature.
struct SyntheticScadaConfig {
    std::size_t rows = 20000;
    std::uint64_t seed = 1;
    /// Fraction of rows written with a deliberate fault (blank cell,
    /// inconsistent max speed, bad timestamp) to exercise the reject paths.
    double dirtyFraction = 0.0;
    std::int64_t startTimestamp = 1388534400; // 2014-01-01T00:00:00Z
    std::int64_t stepSeconds = 600;
    double tiCoupling = 0.35;
    std::string turbineName = "WT1";
};

std::vector<ScadaRecord> generateScadaRecords(const SyntheticScadaConfig& config);

/// Writes a CSV with the default La Haute Borne header names.
void writeScadaCsv(const std::string& path, const SyntheticScadaConfig& config);

} // namespace wpc
