#ifndef DIABNET_PCA_HPP
#define DIABNET_PCA_HPP

#include "diabnet/dataset.hpp"
#include "diabnet/matrix.hpp"

#include <vector>

namespace diabnet {

struct EigenDecomposition {
    std::vector<double> eigenvalues; // descending
    Matrix eigenvectors;             // column j pairs with eigenvalues[j]
};

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations
/// (off-diagonal norm tolerance 1e-12, at most 100 sweeps). Eigenvalues are
/// sorted descending; each eigenvector's largest-magnitude entry is positive.
EigenDecomposition jacobi_eigen(const Matrix& symmetric);

struct PcaResult {
    Matrix projection;                      // n x dims
    std::vector<double> explained_variance; // top-dims eigenvalues, descending
    Matrix components;                      // d x dims eigenvector basis
    std::vector<double> column_means;       // centering applied before projection
};

/// Projects the features of ds onto the top-`dims` principal axes of their
/// population covariance. Expects standardized input.
PcaResult pca_fit_project(const Dataset& ds, std::size_t dims);

} // namespace diabnet

#endif // DIABNET_PCA_HPP
