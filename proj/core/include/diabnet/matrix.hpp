#ifndef DIABNET_MATRIX_HPP
#define DIABNET_MATRIX_HPP

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace diabnet {

/// Dense row-major matrix of doubles. The flat layout fixes the iteration
/// order of every kernel, which is what makes results bit-reproducible.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double& at(std::size_t r, std::size_t c);
    double at(std::size_t r, std::size_t c) const;

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    std::vector<double> extract_row(std::size_t r) const;
    std::vector<double> extract_col(std::size_t c) const;

    /// New matrix made of the given rows of this one, in the given order.
    Matrix select_rows(const std::vector<std::size_t>& indices) const;

    bool operator==(const Matrix& other) const = default;

    /// "3x4" shape string used in error messages.
    std::string shape_str() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

// Elementwise kernels. For the binary ops b must either match a's shape or be
// a single row, which is then broadcast across all rows of a.
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix mul(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double factor);
Matrix map(const Matrix& a, const std::function<double(double)>& fn);

/// Throws unless every stored value is finite.
void check_finite(const Matrix& m, const std::string& context);

} // namespace diabnet

#endif // DIABNET_MATRIX_HPP
