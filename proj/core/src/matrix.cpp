#include "diabnet/matrix.hpp"

#include "diabnet/errors.hpp"

#include <cmath>

namespace diabnet {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw ShapeError("ragged initializer: expected " + std::to_string(cols_) +
                             " columns, got " + std::to_string(r.size()));
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols_) {
            throw ShapeError("ragged row " + std::to_string(r) + ": expected " +
                             std::to_string(m.cols_) + " columns, got " +
                             std::to_string(rows[r].size()));
        }
        for (std::size_t c = 0; c < m.cols_; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

double& Matrix::at(std::size_t r, std::size_t c) {
    if (r >= rows_ || c >= cols_) {
        throw ShapeError("index (" + std::to_string(r) + "," + std::to_string(c) +
                         ") out of range for " + shape_str() + " matrix");
    }
    return (*this)(r, c);
}

double Matrix::at(std::size_t r, std::size_t c) const {
    return const_cast<Matrix*>(this)->at(r, c);
}

std::vector<double> Matrix::extract_row(std::size_t r) const {
    auto span = row(r);
    return {span.begin(), span.end()};
}

std::vector<double> Matrix::extract_col(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

Matrix Matrix::select_rows(const std::vector<std::size_t>& indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= rows_) {
            throw ShapeError("row index " + std::to_string(indices[i]) +
                             " out of range for " + shape_str() + " matrix");
        }
        auto src = row(indices[i]);
        auto dst = out.row(i);
        for (std::size_t c = 0; c < cols_; ++c) dst[c] = src[c];
    }
    return out;
}

std::string Matrix::shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul shape mismatch: " + a.shape_str() + " * " + b.shape_str());
    }
    Matrix out(a.rows(), b.cols());
    // i-k-j order: the inner loop walks both b and out row-major.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto out_row = out.row(i);
        auto a_row = a.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a_row[k];
            if (aik == 0.0) continue;
            auto b_row = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out_row[j] += aik * b_row[j];
            }
        }
    }
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out(c, r) = m(r, c);
        }
    }
    return out;
}

namespace {

Matrix binary_op(const Matrix& a, const Matrix& b, const char* name,
                 double (*op)(double, double)) {
    const bool broadcast = b.rows() == 1 && b.cols() == a.cols() && a.rows() != 1;
    if (!broadcast && (a.rows() != b.rows() || a.cols() != b.cols())) {
        throw ShapeError(std::string(name) + " shape mismatch: " + a.shape_str() +
                         " vs " + b.shape_str());
    }
    Matrix out(a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto b_row = b.row(broadcast ? 0 : r);
        auto a_row = a.row(r);
        auto out_row = out.row(r);
        for (std::size_t c = 0; c < a.cols(); ++c) {
            out_row[c] = op(a_row[c], b_row[c]);
        }
    }
    return out;
}

} // namespace

Matrix add(const Matrix& a, const Matrix& b) {
    return binary_op(a, b, "add", [](double x, double y) { return x + y; });
}

Matrix sub(const Matrix& a, const Matrix& b) {
    return binary_op(a, b, "sub", [](double x, double y) { return x - y; });
}

Matrix mul(const Matrix& a, const Matrix& b) {
    return binary_op(a, b, "mul", [](double x, double y) { return x * y; });
}

Matrix scale(const Matrix& a, double factor) {
    Matrix out(a.rows(), a.cols());
    auto src = a.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] * factor;
    return out;
}

Matrix map(const Matrix& a, const std::function<double(double)>& fn) {
    Matrix out(a.rows(), a.cols());
    auto src = a.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = fn(src[i]);
    return out;
}

void check_finite(const Matrix& m, const std::string& context) {
    for (double v : m.data()) {
        if (!std::isfinite(v)) {
            throw Error(context + ": non-finite value encountered");
        }
    }
}

} // namespace diabnet
