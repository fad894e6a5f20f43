#pragma once

#include <span>
#include <vector>

namespace wpc {

struct NllResult {
    std::vector<double> perSample;
    double mean = 0.0;
};

/// Gaussian negative log-likelihood with a per-sample log-variance:
///   0.5 * (exp(-s) * (y - mu)^2 + s)
/// Working in s = log(variance) avoids dividing by sigma^2 directly.
/// Throws NumericError on non-finite inputs.
NllResult heteroscedasticNll(std::span<const double> y, std::span<const double> mu,
                             std::span<const double> logVar);

/// 0.5 * (y - mu)^2 per sample; the vanilla-NN objective. The half keeps the
/// gradient scale identical to the NLL at frozen unit variance.
NllResult halfSquaredError(std::span<const double> y, std::span<const double> mu);

double meanAbsoluteErrorOf(std::span<const double> y, std::span<const double> mu);

} // namespace wpc
