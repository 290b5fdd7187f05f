#include "diabnet/pca.hpp"

#include "diabnet/errors.hpp"
#include "diabnet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace diabnet {

namespace {

double off_diagonal_norm(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (i != j) sum += a(i, j) * a(i, j);
        }
    }
    return std::sqrt(sum);
}

} // namespace

EigenDecomposition jacobi_eigen(const Matrix& symmetric) {
    if (symmetric.rows() != symmetric.cols()) {
        throw ShapeError("jacobi_eigen: matrix must be square, got " + symmetric.shape_str());
    }
    const std::size_t n = symmetric.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double gap = std::abs(symmetric(i, j) - symmetric(j, i));
            const double magnitude = std::abs(symmetric(i, j)) + std::abs(symmetric(j, i));
            if (gap > 1e-9 * std::max(1.0, magnitude)) {
                throw ShapeError("jacobi_eigen: matrix is not symmetric at (" +
                                 std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }
    Matrix a = symmetric;
    Matrix v = Matrix::identity(n);

    constexpr double kTolerance = 1e-12;
    constexpr int kMaxSweeps = 100;

    for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm(a) > kTolerance; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;

                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                // Smaller-magnitude rotation root keeps the sweep stable.
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a(p, i);
                    const double aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.eigenvalues[j] = a(src, src);

        // Sign convention: largest-magnitude entry positive.
        std::size_t peak = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (std::abs(v(i, src)) > std::abs(v(peak, src))) peak = i;
        }
        const double flip = v(peak, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            out.eigenvectors(i, j) = flip * v(i, src);
        }
    }
    return out;
}

PcaResult pca_fit_project(const Dataset& ds, std::size_t dims) {
    const std::size_t d = ds.cols();
    if (dims == 0) {
        throw ConfigError("pca_fit_project: dims must be at least 1");
    }
    if (dims > d) {
        throw ShapeError("pca_fit_project: dims=" + std::to_string(dims) +
                         " exceeds feature count " + std::to_string(d));
    }
    if (ds.rows() < 2) {
        throw EmptyInputError("pca_fit_project: need at least 2 rows, got " +
                              std::to_string(ds.rows()));
    }

    const std::size_t n = ds.rows();
    const ColumnStats stats = column_stats(ds.features);

    Matrix centered = ds.features;
    for (std::size_t r = 0; r < n; ++r) {
        auto row = centered.row(r);
        for (std::size_t c = 0; c < d; ++c) row[c] -= stats.means[c];
    }

    Matrix covariance = scale(matmul(transpose(centered), centered), 1.0 / static_cast<double>(n));
    EigenDecomposition eig = jacobi_eigen(covariance);

    PcaResult result;
    result.column_means = stats.means;
    result.explained_variance.assign(eig.eigenvalues.begin(), eig.eigenvalues.begin() + dims);
    for (double& ev : result.explained_variance) {
        if (ev < 0.0 && ev > -1e-12) ev = 0.0; // rounding noise on rank-deficient data
    }
    result.components = Matrix(d, dims);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < dims; ++j) {
            result.components(i, j) = eig.eigenvectors(i, j);
        }
    }
    result.projection = matmul(centered, result.components);
    return result;
}

} // namespace diabnet
