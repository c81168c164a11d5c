#pragma once

#include <string>
#include <vector>

#include "shinf/asym_norm.hpp"
#include "shinf/discretization.hpp"

namespace shinf {

enum class Branch { Asymptotic, Frequency };

const char* to_string(Branch b);

struct NormOptions {
    double tol = 1e-6;       // relative level tolerance
    int N = 20;              // discretization order
    bool auto_N = false;     // double N until the predicted level settles
    int max_N = 160;
    int max_level_iter = 200;
    int max_correct_iter = 50;
    AsymNormOptions asym;
};

/// Which branch of max(||T||_inf, strong norm of T_a) is active, where, and
/// the singular-direction vectors there (in the corrector gauge).
struct NormCertificate {
    double value = 0.0;
    Branch kind = Branch::Asymptotic;
    double omega_hat = 0.0;  // frequency branch
    ThetaPoint theta_hat;    // asymptotic branch
    CVector u;
    CVector v;
    double ta_norm = 0.0;
    double predicted = 0.0;  // level from the discretized problem
    bool corrected = false;  // peak correction converged (frequency branch)
    bool simple = true;      // single active point, simple sigma_1
    int iterations = 0;      // level iterations of the prediction
    int N = 0;
    double tol = 0.0;
    double crossing_bound = 0.0;  // largest crossing frequency met above ta_norm
    std::vector<double> history;  // successive levels
    std::vector<double> active_omegas;  // corrected peaks within tol of the value
    std::vector<std::string> warnings;
};

/// Level crossings: nonnegative omega with j omega an eigenvalue of the
/// 2(N+1)n pencil built from (EN, AN, BN, CN) at level xi. An eigenvalue
/// counts as imaginary when |Re| <= 1e-7 (1 + |Im|). Ascending, deduplicated.
std::vector<double> crossing_frequencies(const DiscretizedSystem& dsys, double xi);

struct Prediction {
    double xi_tilde = 0.0;
    std::vector<double> candidates;  // starting frequencies for the corrector
    bool asymptotic = false;         // no crossing above the T_a norm
    int iterations = 0;
    double crossing_bound = 0.0;
    std::vector<double> history;
};

/// Level-set prediction on the discretized system, started at the strong
/// norm of T_a (or at a sampled value of T_N when that norm is 0).
Prediction predict(const DdaeSystem& sys, const DiscretizedSystem& dsys, double ta_norm, double tol,
                   int max_iter = 200);

/// Matrix family j omega E - A0 - sum A_i e^{-j omega tau_i} in s = (omega).
PeakFamily frequency_family(const DdaeSystem& sys);

struct PeakCorrection {
    double value = 0.0;
    double omega = 0.0;
    CVector u;
    CVector v;
    bool converged = false;
    std::vector<double> peaks;  // accepted corrected peak frequencies
    std::vector<double> values; // and their levels
    int dropped = 0;
};

/// Gauss-Newton correction of every candidate on the exact transfer
/// function; returns the largest accepted peak.
PeakCorrection correct_peaks(const DdaeSystem& sys, double xi_tilde,
                             const std::vector<double>& candidates, int max_iter = 50);

/// Strong H-infinity norm. Throws CausalityViolation or
/// StrongStabilityViolation when the assumptions fail.
NormCertificate strong_hinf(const DdaeSystem& sys, const NormOptions& opts = {});

}  // namespace shinf
