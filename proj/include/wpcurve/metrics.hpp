#pragma once

#include <optional>
#include <span>

namespace wpc {

/// Mean absolute error (1/N) * sum |y_i - yhat_i|. Throws DataError on empty
/// or mismatched inputs.
double mae(std::span<const double> yTrue, std::span<const double> yPred);

/// 100 * (nominal - model) / nominal; negative when the model is worse.
/// Throws DataError when nominalMae is not strictly positive.
double improvementVsNominal(double modelMae, double nominalMae);

/// Spearman rank correlation with average ranks for ties. Returns nullopt
/// for fewer than two points (undefined); returns 0 when either side is
/// entirely tied.
std::optional<double> spearmanRank(std::span<const double> a, std::span<const double> b);

} // namespace wpc
