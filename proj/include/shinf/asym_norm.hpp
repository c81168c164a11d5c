#pragma once

#include <vector>

#include "shinf/peak_corrector.hpp"
#include "shinf/transfer.hpp"

namespace shinf {

struct AsymNormResult {
    double value = 0.0;
    double grid_value = 0.0;
    ThetaPoint theta_hat;
    CVector u_a;
    CVector v_a;
    bool converged = false;
    bool multiple_singular = false;  // sigma_1 not simple at the maximizer
    int iterations = 0;
    double residual = 0.0;
    Vector stationarity;  // one entry per effective delay
    std::vector<std::size_t> effective;
};

struct GridSweepResult {
    double value = 0.0;
    ThetaPoint theta_best;
    std::vector<ThetaPoint> near_maxima;  // grid points within 1e-6 (relative) of the max
};

struct AsymNormOptions {
    int points_per_dim = 40;
    int max_iter = 30;
    double tol = 1e-12;
    std::size_t max_grid_points = 2'000'000;
};

/// Max of sigma_1 of the delay-angle form over a uniform grid of [0, 2 pi)
/// in the effective delay angles; the other angles stay at 0. The grid is
/// coarsened when points_per_dim^d exceeds `max_grid_points`.
GridSweepResult grid_sweep(const DdaeSystem& sys, const NullspaceBases& bases,
                           int points_per_dim = 40,
                           std::size_t max_grid_points = 2'000'000);

/// Gauss-Newton refinement of a grid maximizer.
AsymNormResult correct_asym(const DdaeSystem& sys, const NullspaceBases& bases,
                            const ThetaPoint& theta0, double xi0,
                            const AsymNormOptions& opts = {});

/// Strong H-infinity norm of the asymptotic transfer function.
AsymNormResult strong_norm_Ta(const DdaeSystem& sys, const NullspaceBases& bases,
                              const AsymNormOptions& opts = {});

/// Matrix family of the delay-angle form in the effective angles. The
/// non-effective blocks vanish, so their angles do not enter.
PeakFamily asymptotic_family(const DdaeSystem& sys, const NullspaceBases& bases,
                             const std::vector<std::size_t>& effective);

}  // namespace shinf
