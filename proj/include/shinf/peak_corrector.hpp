#pragma once

#include <functional>

#include "shinf/types.hpp"

namespace shinf {

/// A matrix family M(s) over real parameters s, with the Gramians
/// P = B B^T and Q = C^T C of the transfer function G(s) = C M(s)^{-1} B.
///
/// The corrector solves, in the least-squares sense,
///
///   [ M(s)       -P/xi ] [u]
///   [ Q/xi     -M(s)^* ] [v] = 0,
///   |u|^2 + |v|^2 = 2,  Im u_k = 0,
///   Re(v^* dM/ds_l u) = 0   for every parameter l,
///
/// for (u, v, s, xi). The first block states that xi is a singular value of
/// G(s); the last rows state that it is stationary in s.
struct PeakFamily {
    Eigen::Index dim = 0;
    Eigen::Index num_params = 0;
    std::function<CMatrix(const Vector& s)> M;
    std::function<CMatrix(const Vector& s, Eigen::Index k)> dM;
    std::function<CMatrix(const Vector& s, Eigen::Index k, Eigen::Index l)> d2M;
    Matrix P;
    Matrix Q;
};

struct PeakState {
    CVector u;
    CVector v;
    Vector s;
    double xi = 0.0;
};

struct PeakResult {
    PeakState state;
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
    Vector stationarity;  // Re(v^* dM/ds_l u) at the final point
};

/// The 2d x 2d matrix H(s, xi) of the first block row pair.
CMatrix peak_matrix(const PeakFamily& f, const Vector& s, double xi);

/// Starting vectors from the right singular vector of H(s, xi) belonging to
/// its smallest singular value, scaled to the corrector gauge.
PeakState start_from_min_singular(const PeakFamily& f, const Vector& s, double xi);

/// Rescales (u, v) so that |u|^2 + |v|^2 = 2 and the largest-magnitude entry
/// of u is real and positive.
void normalize_gauge(PeakState& st);

/// Gauss-Newton iteration; stops when the residual 2-norm drops below `tol`
/// or after `max_iter` steps.
PeakResult correct_peak(const PeakFamily& f, PeakState start, int max_iter = 30,
                        double tol = 1e-12);

/// Full residual vector of the system above (for tests and diagnostics).
Vector peak_residual(const PeakFamily& f, const PeakState& st, Eigen::Index gauge_index);

}  // namespace shinf
