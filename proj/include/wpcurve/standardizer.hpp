#pragma once

#include "wpcurve/matrix.hpp"

#include <vector>

namespace wpc {

/// Per-feature and target affine scaling fitted on the training split only.
/// Variances destandardize by (target std)^2.
class Standardizer {
public:
    Standardizer() = default;

    /// Throws DataError when a feature column is constant (std <= 1e-12),
    /// naming the column index.
    static Standardizer fit(const Matrix& x, const std::vector<double>& y);

    Matrix apply(const Matrix& x) const;
    Matrix invert(const Matrix& z) const;
    std::vector<double> applyTarget(const std::vector<double>& y) const;

    double destandardizeMean(double z) const { return z * targetStd_ + targetMean_; }
    double destandardizeVariance(double var) const { return var * targetStd_ * targetStd_; }

    std::size_t featureCount() const noexcept { return featureMean_.size(); }
    const std::vector<double>& featureMeans() const noexcept { return featureMean_; }
    const std::vector<double>& featureStds() const noexcept { return featureStd_; }
    double targetMean() const noexcept { return targetMean_; }
    double targetStd() const noexcept { return targetStd_; }

    /// Used by checkpoint deserialization.
    static Standardizer fromMoments(std::vector<double> featureMean,
                                    std::vector<double> featureStd, double targetMean,
                                    double targetStd);

    bool operator==(const Standardizer&) const = default;

private:
    std::vector<double> featureMean_;
    std::vector<double> featureStd_;
    double targetMean_ = 0.0;
    double targetStd_ = 1.0;
};

} // namespace wpc
