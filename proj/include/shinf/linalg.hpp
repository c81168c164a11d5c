#pragma once

#include <vector>

#include "shinf/types.hpp"

namespace shinf {

/// Generalized eigenvalues of the real pencil lambda*B - A (QZ via LAPACK
/// dggev). Eigenvalues with |alpha| > 1e10 |beta| are treated as infinite
/// and dropped.
std::vector<Complex> finite_generalized_eigenvalues(const Matrix& A, const Matrix& B);

/// Largest real part among the finite generalized eigenvalues
/// (-infinity when there are none).
double spectral_abscissa(const Matrix& A, const Matrix& B);

}  // namespace shinf
