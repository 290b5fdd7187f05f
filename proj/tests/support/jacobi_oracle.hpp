#ifndef DIABNET_TESTS_JACOBI_ORACLE_HPP
#define DIABNET_TESTS_JACOBI_ORACLE_HPP

#include <diabnet/matrix.hpp>

#include <vector>

namespace testsupport {

struct OracleEigen {
    std::vector<double> values; // descending
    diabnet::Matrix vectors;    // column j pairs with values[j]
};

/// Independent eigensolver used as an oracle: classical Jacobi with
/// largest-off-diagonal pivoting (the library uses cyclic sweeps), written
/// from the textbook formulas without sharing any library code.
OracleEigen pivot_jacobi(const diabnet::Matrix& symmetric);

} // namespace testsupport

#endif // DIABNET_TESTS_JACOBI_ORACLE_HPP
