#ifndef DIABNET_STATS_HPP
#define DIABNET_STATS_HPP

#include "diabnet/matrix.hpp"

#include <vector>

namespace diabnet {

struct ColumnStats {
    std::vector<double> means;
    std::vector<double> stds; // population convention (divide by n)
};

/// Per-column mean and population standard deviation.
ColumnStats column_stats(const Matrix& m);

/// Symmetric population covariance matrix of the columns of m (divide by n).
Matrix covariance_matrix(const Matrix& m);

/// Symmetric Pearson correlation matrix of the columns of m.
/// Uses the population convention throughout; the diagonal is exactly 1.
/// Throws DegenerateColumnError if any column has zero variance.
Matrix pearson_correlation(const Matrix& m);

} // namespace diabnet

#endif // DIABNET_STATS_HPP
