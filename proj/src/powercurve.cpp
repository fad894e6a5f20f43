#include "wpcurve/powercurve.hpp"

#include "wpcurve/csv.hpp"
#include "wpcurve/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace wpc {

BinnedPowerCurve BinnedPowerCurve::fit(std::span<const double> windSpeed,
                                       std::span<const double> powerKw, double binWidth) {
    if (windSpeed.empty()) throw DataError("method of bins: empty training set");
    if (windSpeed.size() != powerKw.size()) {
        throw DataError("method of bins: speed/power length mismatch");
    }
    if (!(binWidth > 0.0)) throw DataError("method of bins: bin width must be positive");

    std::map<long, std::pair<double, std::size_t>> bins; // index -> (sum, count)
    for (std::size_t i = 0; i < windSpeed.size(); ++i) {
        const long idx = static_cast<long>(std::floor(windSpeed[i] / binWidth));
        auto& [sum, count] = bins[idx];
        sum += powerKw[i];
        ++count;
    }

    BinnedPowerCurve curve;
    curve.binWidth_ = binWidth;
    for (const auto& [idx, agg] : bins) {
        curve.centers_.push_back((static_cast<double>(idx) + 0.5) * binWidth);
        curve.means_.push_back(agg.first / static_cast<double>(agg.second));
    }
    return curve;
}

double BinnedPowerCurve::predict(double windSpeed) const {
    if (centers_.empty()) throw DataError("method of bins: curve has no bins");
    if (windSpeed <= centers_.front()) return means_.front();
    if (windSpeed >= centers_.back()) return means_.back();
    const auto it = std::upper_bound(centers_.begin(), centers_.end(), windSpeed);
    const std::size_t hi = static_cast<std::size_t>(it - centers_.begin());
    const std::size_t lo = hi - 1;
    const double t = (windSpeed - centers_[lo]) / (centers_[hi] - centers_[lo]);
    return means_[lo] + t * (means_[hi] - means_[lo]);
}

NominalCurve::NominalCurve(std::vector<double> speeds, std::vector<double> powersKw, double cutIn,
                           double cutOut, double ratedSpeed, double ratedPowerKw)
    : speeds_(std::move(speeds)),
      powersKw_(std::move(powersKw)),
      cutIn_(cutIn),
      cutOut_(cutOut),
      ratedSpeed_(ratedSpeed),
      ratedPowerKw_(ratedPowerKw) {
    validate();
}

void NominalCurve::validate() const {
    if (speeds_.size() != powersKw_.size() || speeds_.size() < 2) {
        throw DataError("nominal curve needs at least two (speed, power) breakpoints");
    }
    for (std::size_t i = 1; i < speeds_.size(); ++i) {
        if (!(speeds_[i] > speeds_[i - 1])) {
            throw DataError("nominal curve speeds must be strictly increasing");
        }
    }
    for (double p : powersKw_) {
        if (!(p <= ratedPowerKw_ * 1.0001) || p < 0.0) {
            throw DataError("nominal curve power values must lie in [0, rated power]");
        }
    }
    if (speeds_.front() > cutIn_ || speeds_.back() < cutOut_) {
        throw DataError("nominal curve breakpoints must cover [cut-in, cut-out]");
    }
    const double atRated = predict(ratedSpeed_);
    if (std::abs(atRated - ratedPowerKw_) > 0.01 * ratedPowerKw_) {
        throw DataError("nominal curve misses rated power at rated speed by more than 1%");
    }
}

NominalCurve NominalCurve::loadCsv(const std::string& path, double cutIn, double cutOut,
                                   double ratedSpeed, double ratedPowerKw) {
    const CsvTable table = readCsvFile(path);
    if (table.headers.size() < 2) {
        throw DataError("nominal curve CSV needs (wind_speed_ms, power_kw) columns: " + path);
    }
    std::vector<double> speeds, powers;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (row.size() < 2) throw DataError("nominal curve CSV: short row " + std::to_string(i + 1));
        const auto s = parseDouble(row[0]);
        const auto p = parseDouble(row[1]);
        if (!s || !p) {
            throw DataError("nominal curve CSV: non-numeric row " + std::to_string(i + 1));
        }
        speeds.push_back(*s);
        powers.push_back(*p);
    }
    return {std::move(speeds), std::move(powers), cutIn, cutOut, ratedSpeed, ratedPowerKw};
}

double NominalCurve::predict(double windSpeed) const {
    if (windSpeed < 0.0) throw DataError("nominal curve: negative wind speed");
    if (windSpeed < cutIn_ || windSpeed > cutOut_) return 0.0;
    if (windSpeed <= speeds_.front()) return powersKw_.front();
    if (windSpeed >= speeds_.back()) return powersKw_.back();
    const auto it = std::upper_bound(speeds_.begin(), speeds_.end(), windSpeed);
    const std::size_t hi = static_cast<std::size_t>(it - speeds_.begin());
    const std::size_t lo = hi - 1;
    const double t = (windSpeed - speeds_[lo]) / (speeds_[hi] - speeds_[lo]);
    return powersKw_[lo] + t * (powersKw_[hi] - powersKw_[lo]);
}

} // namespace wpc
