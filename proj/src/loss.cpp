#include "wpcurve/loss.hpp"

#include "wpcurve/error.hpp"

#include <cmath>
#include <string>

namespace wpc {

NllResult heteroscedasticNll(std::span<const double> y, std::span<const double> mu,
                             std::span<const double> logVar) {
    if (y.size() != mu.size() || y.size() != logVar.size()) {
        throw DataError("heteroscedastic NLL: length mismatch");
    }
    NllResult out;
    out.perSample.resize(y.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i]) || !std::isfinite(mu[i]) || !std::isfinite(logVar[i])) {
            throw NumericError("heteroscedastic NLL: non-finite input at sample " +
                               std::to_string(i));
        }
        const double r = y[i] - mu[i];
        const double v = 0.5 * (std::exp(-logVar[i]) * r * r + logVar[i]);
        out.perSample[i] = v;
        acc += v;
    }
    out.mean = y.empty() ? 0.0 : acc / static_cast<double>(y.size());
    return out;
}

NllResult halfSquaredError(std::span<const double> y, std::span<const double> mu) {
    if (y.size() != mu.size()) throw DataError("squared error: length mismatch");
    NllResult out;
    out.perSample.resize(y.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - mu[i];
        out.perSample[i] = 0.5 * r * r;
        acc += out.perSample[i];
    }
    out.mean = y.empty() ? 0.0 : acc / static_cast<double>(y.size());
    return out;
}

double meanAbsoluteErrorOf(std::span<const double> y, std::span<const double> mu) {
    if (y.size() != mu.size() || y.empty()) {
        throw DataError("MAE needs two non-empty vectors of equal length");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += std::abs(y[i] - mu[i]);
    return acc / static_cast<double>(y.size());
}

} // namespace wpc
