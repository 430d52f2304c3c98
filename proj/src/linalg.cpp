#include "betasurv/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace betasurv {

Cholesky cholesky_decompose(const std::vector<double>& matrix, std::size_t n) {
    if (matrix.size() != n * n) throw std::invalid_argument("matrix size mismatch");
    Cholesky c;
    c.n = n;
    c.lower.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = matrix[i * n + j];
            for (std::size_t k = 0; k < j; ++k) sum -= c.lower[i * n + k] * c.lower[j * n + k];
            if (i == j) {
                if (sum <= 0.0 || !std::isfinite(sum)) {
                    throw std::runtime_error("matrix is not positive definite");
                }
                c.lower[i * n + i] = std::sqrt(sum);
            } else {
                c.lower[i * n + j] = sum / c.lower[j * n + j];
            }
        }
    }
    return c;
}

std::vector<double> cholesky_solve(const Cholesky& chol, const std::vector<double>& rhs) {
    const std::size_t n = chol.n;
    if (rhs.size() != n) throw std::invalid_argument("rhs size mismatch");
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = rhs[i];
        for (std::size_t k = 0; k < i; ++k) sum -= chol.lower[i * n + k] * y[k];
        y[i] = sum / chol.lower[i * n + i];
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double sum = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) sum -= chol.lower[k * n + ii] * x[k];
        x[ii] = sum / chol.lower[ii * n + ii];
    }
    return x;
}

}  // namespace betasurv
