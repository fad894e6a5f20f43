#pragma once

#include <span>
#include <string>
#include <vector>

namespace wpc {

/// Method-of-bins baseline: mean power per fixed wind-speed bin, linear
/// interpolation between occupied bin centers, clamped at the edges.
class BinnedPowerCurve {
public:
    static BinnedPowerCurve fit(std::span<const double> windSpeed,
                                std::span<const double> powerKw, double binWidth = 0.5);

    double predict(double windSpeed) const;

    double binWidth() const noexcept { return binWidth_; }
    const std::vector<double>& binCenters() const noexcept { return centers_; }
    const std::vector<double>& binMeans() const noexcept { return means_; }

private:
    double binWidth_ = 0.5;
    std::vector<double> centers_; // occupied bins only, ascending
    std::vector<double> means_;
};

/// Manufacturer curve from a breakpoint table. Zero below cut-in and beyond
/// cut-out, piecewise linear in between.
class NominalCurve {
public:
    NominalCurve() = default;
    NominalCurve(std::vector<double> speeds, std::vector<double> powersKw, double cutIn,
                 double cutOut, double ratedSpeed, double ratedPowerKw);

    /// CSV with headers (wind_speed_ms, power_kw). Turbine constants default
    /// to the MM82 datasheet values.
    static NominalCurve loadCsv(const std::string& path, double cutIn = 3.5, double cutOut = 20.0,
                                double ratedSpeed = 14.5, double ratedPowerKw = 2050.0);

    double predict(double windSpeed) const;

    double cutIn() const noexcept { return cutIn_; }
    double cutOut() const noexcept { return cutOut_; }
    double ratedSpeed() const noexcept { return ratedSpeed_; }
    double ratedPowerKw() const noexcept { return ratedPowerKw_; }
    const std::vector<double>& speeds() const noexcept { return speeds_; }
    const std::vector<double>& powersKw() const noexcept { return powersKw_; }

private:
    std::vector<double> speeds_;
    std::vector<double> powersKw_;
    double cutIn_ = 3.5;
    double cutOut_ = 20.0;
    double ratedSpeed_ = 14.5;
    double ratedPowerKw_ = 2050.0;

    void validate() const;
};

} // namespace wpc
