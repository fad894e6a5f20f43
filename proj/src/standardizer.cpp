#include "wpcurve/standardizer.hpp"

#include "wpcurve/error.hpp"

#include <string>

namespace wpc {

Standardizer Standardizer::fit(const Matrix& x, const std::vector<double>& y) {
    if (x.rows() == 0) throw DataError("standardizer: training split is empty");
    if (y.size() != x.rows()) throw DataError("standardizer: feature/target row mismatch");

    Standardizer s;
    s.featureMean_ = columnMeans(x);
    s.featureStd_ = columnStds(x, s.featureMean_);
    for (std::size_t c = 0; c < s.featureStd_.size(); ++c) {
        if (s.featureStd_[c] <= 1e-12) {
            throw DataError("standardizer: feature column " + std::to_string(c) +
                            " is constant on the training split");
        }
    }
    s.targetMean_ = vectorMean(y);
    s.targetStd_ = vectorStd(y, s.targetMean_);
    if (s.targetStd_ <= 1e-12) throw DataError("standardizer: target is constant");
    return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
    if (x.cols() != featureMean_.size()) {
        throw DataError("standardizer: expected " + std::to_string(featureMean_.size()) +
                        " features, got " + std::to_string(x.cols()));
    }
    Matrix z(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const double* in = x.rowPtr(r);
        double* out = z.rowPtr(r);
        for (std::size_t c = 0; c < x.cols(); ++c) {
            out[c] = (in[c] - featureMean_[c]) / featureStd_[c];
        }
    }
    return z;
}

Matrix Standardizer::invert(const Matrix& z) const {
    if (z.cols() != featureMean_.size()) {
        throw DataError("standardizer: expected " + std::to_string(featureMean_.size()) +
                        " features, got " + std::to_string(z.cols()));
    }
    Matrix x(z.rows(), z.cols());
    for (std::size_t r = 0; r < z.rows(); ++r) {
        const double* in = z.rowPtr(r);
        double* out = x.rowPtr(r);
        for (std::size_t c = 0; c < z.cols(); ++c) {
            out[c] = in[c] * featureStd_[c] + featureMean_[c];
        }
    }
    return x;
}

std::vector<double> Standardizer::applyTarget(const std::vector<double>& y) const {
    std::vector<double> z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) z[i] = (y[i] - targetMean_) / targetStd_;
    return z;
}

Standardizer Standardizer::fromMoments(std::vector<double> featureMean,
                                       std::vector<double> featureStd, double targetMean,
                                       double targetStd) {
    Standardizer s;
    s.featureMean_ = std::move(featureMean);
    s.featureStd_ = std::move(featureStd);
    s.targetMean_ = targetMean;
    s.targetStd_ = targetStd;
    return s;
}

} // namespace wpc
