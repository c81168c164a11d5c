#pragma once

#include "shinf/transfer.hpp"

namespace shinf {

/// Frequency grid for brute-force references.
struct DenseSweepSpec {
    double omega_min = 1e-3;
    double omega_max = 1e3;
    int points = 4000;
    bool log_spaced = true;
    bool include_zero = true;
    int theta_points = 400;  // per effective delay angle
};

struct DenseResult {
    double value = 0.0;
    double omega = 0.0;
    ThetaPoint theta;
};

/// Grid maximum of sigma_1(T(j omega)) refined by golden-section search
/// around the three best grid points. A lower bound for the H-infinity norm.
DenseResult dense_hinf(const DdaeSystem& sys, const DenseSweepSpec& spec = {});

/// Grid maximum of sigma_1 of the delay-angle transfer function refined
/// coordinate-wise. 0 when E is nonsingular.
DenseResult dense_ta(const DdaeSystem& sys, const NullspaceBases& bases, const DenseSweepSpec& spec = {});

/// Classical level-set bisection for C (sI - A)^{-1} B with Hurwitz A,
/// using the standard Hamiltonian matrix and Eigen's dense eigensolver.
/// Throws StrongStabilityViolation for non-Hurwitz A.
double bb_bisection(const Matrix& A, const Matrix& B, const Matrix& C, double tol = 1e-10);

}  // namespace shinf
