#pragma once

#include "wpcurve/matrix.hpp"
#include "wpcurve/scada.hpp"

#include <string>
#include <utility>
#include <vector>

namespace wpc {

enum class Feature {
    WS,     // mean wind speed, m/s
    T,      // ambient temperature, deg C
    DirSin, // sin of wind direction
    DirCos, // cos of wind direction
    TI,     // turbulence intensity sigma_v / v_bar
    G,      // gust factor v_max / v_bar
    Shear,  // anemometer speed ratio v / v0
    Pitch,  // blade pitch angle, deg
    NacSin, // sin of nacelle angle
    NacCos, // cos of nacelle angle
};

const char* featureName(Feature f);
Feature featureFromName(const std::string& name); // throws ConfigError on unknown names

/// Ordered, duplicate-free feature list. WS must be present: wind speed is
/// the primary predictor and every report is binned over it.
class FeatureSpec {
public:
    FeatureSpec() = default;
    explicit FeatureSpec(std::vector<Feature> features);
    static FeatureSpec fromNames(const std::vector<std::string>& names);
    static FeatureSpec full();

    const std::vector<Feature>& features() const noexcept { return features_; }
    std::size_t size() const noexcept { return features_.size(); }
    std::vector<std::string> names() const;
    std::string label() const; // "WS+TI+G"

    bool operator==(const FeatureSpec&) const = default;

private:
    std::vector<Feature> features_;
};

/// sigma_v / v_bar. Requires v_bar >= 0.1 (cleaning guarantees it upstream).
double turbulenceIntensity(double sigmaV, double vBar);

/// v / v0, the speed ratio standing in for shear when anemometer heights are
/// unknown. Requires v0 >= 0.1.
double windShearIndicator(double v, double v0);

/// v_max / v_bar, >= 1 for consistent sensors. Throws on v_max < v_bar.
double gustFactor(double vMax, double vBar);

/// (sin, cos) of an angle in degrees; removes the 360/0 discontinuity.
std::pair<double, double> encodeAngle(double degrees);

/// Feature matrix plus everything downstream stages need aligned row-by-row.
struct FeatureSet {
    FeatureSpec spec;
    Matrix x;                           // n x spec.size()
    std::vector<double> powerKw;        // targets; NaN entries when absent
    std::vector<double> windSpeed;      // m/s, for binning and baselines
    std::vector<std::int64_t> timestamps;
    std::vector<long> sourceRows;
    bool hasPower = true;

    std::size_t rows() const noexcept { return x.rows(); }
};

/// Columns follow spec order; engineered quantities computed via the
/// functions above. Records must already be cleaned.
FeatureSet buildFeatures(const std::vector<ScadaRecord>& records, const FeatureSpec& spec);

/// Sensor channels a feature set actually reads (wind speed is always
/// included; TI also needs the speed std, G the max, and so on).
std::vector<Channel> channelsForSpec(const FeatureSpec& spec);

} // namespace wpc
