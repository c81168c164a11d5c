#include "shinf/linalg.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <lapacke.h>

namespace shinf {

std::vector<Complex> finite_generalized_eigenvalues(const Matrix& A, const Matrix& B) {
    const lapack_int n = static_cast<lapack_int>(A.rows());
    if (A.cols() != n || B.rows() != n || B.cols() != n) {
        throw DimensionError("pencil matrices must be square and of equal size");
    }
    std::vector<Complex> out;
    if (n == 0) return out;

    // column-major copies; dggev overwrites its inputs
    Matrix a = A;
    Matrix b = B;
    std::vector<double> alphar(n), alphai(n), beta(n);
    const lapack_int info =
        LAPACKE_dggev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, b.data(), n, alphar.data(),
                      alphai.data(), beta.data(), nullptr, 1, nullptr, 1);
    if (info != 0) {
        throw NumericalFailure("QZ iteration failed (dggev info = " + std::to_string(info) + ")");
    }
    out.reserve(static_cast<std::size_t>(n));
    for (lapack_int i = 0; i < n; ++i) {
        const double amag = std::hypot(alphar[i], alphai[i]);
        if (!(std::abs(beta[i]) * 1e10 > amag)) continue;
        out.emplace_back(alphar[i] / beta[i], alphai[i] / beta[i]);
    }
    return out;
}

double spectral_abscissa(const Matrix& A, const Matrix& B) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Complex& l : finite_generalized_eigenvalues(A, B)) best = std::max(best, l.real());
    return best;
}

}  // namespace shinf
