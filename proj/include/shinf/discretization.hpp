#pragma once

#include <vector>

#include "shinf/transfer.hpp"

namespace shinf {

/// Finite-dimensional approximation EN z' = AN z + BN w, out = CN z of a DDAE,
/// obtained by collocating the history segment on N+1 Chebyshev extreme
/// points of [-tau_max, 0]. Block 0 is the point theta = 0 and carries the
/// DDAE itself; blocks 1..N carry the transport equation.
struct DiscretizedSystem {
    Matrix EN;
    Matrix AN;
    Matrix BN;
    Matrix CN;
    int N = 0;
    Eigen::Index n = 0;
    std::vector<double> mesh;  // theta_0 = 0 > theta_1 > ... > theta_N = -tau_max
};

/// Chebyshev extreme points cos(pi k / N), k = 0..N, on [-1, 1].
std::vector<double> chebyshev_points(int N);

/// Spectral differentiation matrix on the Chebyshev extreme points.
Matrix chebyshev_diff_matrix(int N);

/// Row of Lagrange basis values l_j(t) on the given nodes (barycentric form
/// for Chebyshev extreme points). Exact unit vector when t hits a node.
Vector barycentric_row(const std::vector<double>& nodes, double t);

/// Requires N >= 2.
DiscretizedSystem discretize(const DdaeSystem& sys, int N);

/// T_N(lambda) = CN (lambda EN - AN)^{-1} BN.
FrequencyResponse eval_TN(const DiscretizedSystem& dsys, Complex lambda);

struct StabilityReport {
    bool stable = false;
    double abscissa = 0.0;      // rightmost finite eigenvalue of (AN, EN)
    double delta_radius = 0.0;  // max over theta of rho((U^T A0 V)^{-1} sum U^T A_i V e^{j theta_i})
    bool causal = true;
};

/// Spectral radius of the delay-difference part maximized over the delay
/// angles (grid plus coordinate refinement). 0 when v = 0 or there are no
/// effective delays.
double difference_radius(const DdaeSystem& sys, const NullspaceBases& bases);

/// Strong exponential stability: abscissa < -1e-8 and delta_radius < 1.
StabilityReport strong_stability_check(const DdaeSystem& sys, const NullspaceBases& bases, int N = 20);

}  // namespace shinf
