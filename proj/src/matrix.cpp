#include "wpcurve/matrix.hpp"

#include "wpcurve/error.hpp"

#include <cmath>
#include <string>

namespace wpc {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

Matrix Matrix::fromRows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols()) {
            throw DataError("fromRows: ragged input, row " + std::to_string(r) + " has " +
                            std::to_string(rows[r].size()) + " columns, expected " +
                            std::to_string(m.cols()));
        }
        for (std::size_t c = 0; c < m.cols(); ++c) m.at(r, c) = rows[r][c];
    }
    return m;
}

bool Matrix::allFinite() const noexcept {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double Matrix::frobeniusNormSq() const noexcept {
    double acc = 0.0;
    for (double v : data_) acc += v * v;
    return acc;
}

namespace {

std::string shapeStr(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

} // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DataError("matmul: dimension mismatch, " + shapeStr(a) + " times " + shapeStr(b));
    }
    Matrix out(a.rows(), b.cols());
    const std::size_t k = a.cols();
    const std::size_t n = b.cols();
    // ikj order: streams over b and out rows, good enough for these sizes.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.rowPtr(i);
        double* orow = out.rowPtr(i);
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            if (av == 0.0) continue;
            const double* brow = b.rowPtr(p);
            for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) out.at(c, r) = m.at(r, c);
    }
    return out;
}

std::vector<double> columnMeans(const Matrix& m) {
    std::vector<double> means(m.cols(), 0.0);
    if (m.rows() == 0) return means;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* row = m.rowPtr(r);
        for (std::size_t c = 0; c < m.cols(); ++c) means[c] += row[c];
    }
    for (double& v : means) v /= static_cast<double>(m.rows());
    return means;
}

std::vector<double> columnStds(const Matrix& m, const std::vector<double>& means) {
    std::vector<double> stds(m.cols(), 0.0);
    if (m.rows() == 0) return stds;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* row = m.rowPtr(r);
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double d = row[c] - means[c];
            stds[c] += d * d;
        }
    }
    for (double& v : stds) v = std::sqrt(v / static_cast<double>(m.rows()));
    return stds;
}

double vectorMean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double vectorStd(std::span<const double> v, double mean) {
    if (v.empty()) return 0.0;
    double acc = 0.0;
    for (double x : v) {
        const double d = x - mean;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(v.size()));
}

} // namespace wpc
