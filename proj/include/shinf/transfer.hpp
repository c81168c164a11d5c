#pragma once

#include <vector>

#include "shinf/ddae.hpp"

namespace shinf {

struct FrequencyResponse {
    Complex lambda;
    CMatrix matrix;
    double sigma1 = 0.0;
};

/// Angles (radians) of the delay terms, one per delay.
struct ThetaPoint {
    std::vector<double> theta;
};

/// Wraps an angle into [0, 2*pi).
double wrap_angle(double a);

/// Largest singular value (0 for empty matrices).
double sigma_max(const CMatrix& m);

/// All singular values, descending.
Vector singular_values(const CMatrix& m);

/// lambda E - A0 - sum A_i exp(-lambda tau_i).
CMatrix characteristic_matrix(const DdaeSystem& sys, Complex lambda);

/// -U^T A0 V - sum U^T A_i V exp(-j theta_i).
CMatrix asymptotic_matrix(const DdaeSystem& sys, const NullspaceBases& bases,
                          const std::vector<double>& theta);

/// T(lambda) = C (lambda E - A0 - sum A_i e^{-lambda tau_i})^{-1} B.
/// Throws TransmissionPole when the resolvent is numerically singular
/// (reciprocal condition estimate below 1e-14).
FrequencyResponse eval_T(const DdaeSystem& sys, Complex lambda);

/// Delay-angle form C V (-U^T A0 V - sum U^T A_i V e^{-j theta_i})^{-1} U^T B.
FrequencyResponse eval_Ta_theta(const DdaeSystem& sys, const NullspaceBases& bases,
                                const ThetaPoint& point);

/// Asymptotic transfer function at lambda = j omega, i.e. eval_Ta_theta at
/// theta_i = omega tau_i mod 2 pi. For general lambda the exponentials
/// e^{-lambda tau_i} are used directly.
FrequencyResponse eval_Ta(const DdaeSystem& sys, const NullspaceBases& bases, Complex lambda);

struct SweepRow {
    double omega;
    Vector sigma;  // descending singular values, truncated to the requested count
};

/// Singular values of T(j omega) over a frequency list.
std::vector<SweepRow> sweep(const DdaeSystem& sys, const std::vector<double>& omegas,
                            int num_sigma = 1);

/// Logarithmically spaced points in [lo, hi].
std::vector<double> logspace(double lo, double hi, int count);

}  // namespace shinf
