#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wpc {

/// Dense row-major matrix of doubles. The storage primitive for network
/// weights, feature tables and everything in between. Small on purpose:
/// exactly the operations the rest of the library needs, no view machinery.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix fromRows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* rowPtr(std::size_t r) { return data_.data() + r * cols_; }
    const double* rowPtr(std::size_t r) const { return data_.data() + r * cols_; }

    std::span<double> row(std::size_t r) { return {rowPtr(r), cols_}; }
    std::span<const double> row(std::size_t r) const { return {rowPtr(r), cols_}; }

    std::vector<double>& data() noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    bool allFinite() const noexcept;
    double frobeniusNormSq() const noexcept;

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// a (m×k) times b (k×n). Throws DataError naming both shapes on mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);

/// Per-column mean / population standard deviation, used by the standardizer
/// and the ingest statistics table.
std::vector<double> columnMeans(const Matrix& m);
std::vector<double> columnStds(const Matrix& m, const std::vector<double>& means);

double vectorMean(std::span<const double> v);
double vectorStd(std::span<const double> v, double mean);

} // namespace wpc
