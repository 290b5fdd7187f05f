#include "diabnet/stats.hpp"

#include "diabnet/errors.hpp"

#include <algorithm>
#include <cmath>

namespace diabnet {

ColumnStats column_stats(const Matrix& m) {
    if (m.rows() == 0) {
        throw EmptyInputError("column_stats: matrix has no rows");
    }
    const std::size_t n = m.rows();
    const std::size_t d = m.cols();
    ColumnStats stats;
    stats.means.assign(d, 0.0);
    stats.stds.assign(d, 0.0);

    for (std::size_t c = 0; c < d; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) sum += m(r, c);
        stats.means[c] = sum / static_cast<double>(n);
    }
    for (std::size_t c = 0; c < d; ++c) {
        double sq = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double delta = m(r, c) - stats.means[c];
            sq += delta * delta;
        }
        stats.stds[c] = std::sqrt(sq / static_cast<double>(n));
    }
    return stats;
}

Matrix covariance_matrix(const Matrix& m) {
    const std::size_t n = m.rows();
    const std::size_t d = m.cols();
    const ColumnStats stats = column_stats(m);

    Matrix cov(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double sum = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                sum += (m(r, i) - stats.means[i]) * (m(r, j) - stats.means[j]);
            }
            const double value = sum / static_cast<double>(n);
            cov(i, j) = value;
            cov(j, i) = value;
        }
    }
    return cov;
}

Matrix pearson_correlation(const Matrix& m) {
    if (m.rows() < 2) {
        throw EmptyInputError("pearson_correlation: need at least 2 rows, got " +
                              std::to_string(m.rows()));
    }
    const std::size_t n = m.rows();
    const std::size_t d = m.cols();
    const ColumnStats stats = column_stats(m);
    for (std::size_t c = 0; c < d; ++c) {
        if (stats.stds[c] == 0.0) {
            throw DegenerateColumnError("pearson_correlation: column " + std::to_string(c) +
                                        " has zero variance");
        }
    }

    Matrix corr(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        corr(i, i) = 1.0;
        for (std::size_t j = i + 1; j < d; ++j) {
            double cov = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                cov += (m(r, i) - stats.means[i]) * (m(r, j) - stats.means[j]);
            }
            cov /= static_cast<double>(n);
            const double r_ij = std::clamp(cov / (stats.stds[i] * stats.stds[j]), -1.0, 1.0);
            corr(i, j) = r_ij;
            corr(j, i) = r_ij;
        }
    }
    return corr;
}

} // namespace diabnet
