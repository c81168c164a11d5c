#pragma once

#include "shinf/levelset.hpp"

namespace shinf {

struct GradientResult {
    Vector grad;
    Branch branch = Branch::Frequency;
    bool smooth = true;
};

/// Derivative of the strong H-infinity norm with respect to the parameters
/// of an affine template, from the active point and singular vectors stored
/// in `cert` (which must have been computed at p). At nonsmooth points the
/// formula is evaluated at the recorded active point and `smooth` is false.
GradientResult grad_strong_hinf(const AffineDdae& tmpl, const Vector& p, const NormCertificate& cert);

struct FiniteDiffReport {
    Vector analytic;
    Vector numeric;
    double value = 0.0;
    double max_abs_error = 0.0;
    double max_rel_error = 0.0;  // max |g - fd| / |fd|_inf
    bool smooth = true;
    Branch branch = Branch::Frequency;
};

/// Central differences of strong_hinf, step * (1 + |p_k|) per component.
FiniteDiffReport finite_diff_check(const AffineDdae& tmpl, const Vector& p, double step = 1e-5,
                                   const NormOptions& opts = {});

}  // namespace shinf
