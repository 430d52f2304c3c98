#pragma once

#include <cstddef>
#include <vector>

namespace betasurv {

// Minimal dense SPD machinery for the Laplace posterior (d <= 200 gate keeps
// this desk-scale). Matrices are row-major n x n.
struct Cholesky {
    std::size_t n = 0;
    std::vector<double> lower;
};

// Throws std::runtime_error when the matrix is not positive definite.
Cholesky cholesky_decompose(const std::vector<double>& matrix, std::size_t n);

std::vector<double> cholesky_solve(const Cholesky& chol, const std::vector<double>& rhs);

}  // namespace betasurv
