#pragma once

#include <functional>
#include <span>
#include <vector>

namespace wpc {

/// Compares an analytic gradient against central finite differences of f at x.
/// Returns the max over coordinates of
///   |analytic - central| / max(|analytic|, |central|, 1e-8).
/// Step h = 1e-6 balances truncation against round-off at 64-bit precision.
double gradCheck(const std::function<double(std::span<const double>)>& f,
                 std::span<const double> x,
                 std::span<const double> analyticGrad,
                 double h = 1e-6);

} // namespace wpc
