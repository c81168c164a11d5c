#include "shinf/asym_norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace shinf {

namespace {

struct ReducedBlocks {
    CMatrix M0;               // -U^T A0 V
    std::vector<CMatrix> Mi;  // U^T A_i V for the effective delays
    CMatrix Cv;               // C V
    CMatrix Ub;               // U^T B
};

ReducedBlocks reduce(const DdaeSystem& sys, const NullspaceBases& bases,
                     const std::vector<std::size_t>& effective) {
    ReducedBlocks r;
    const Matrix Ut = bases.U.transpose();
    r.M0 = (-(Ut * sys.A(0) * bases.V)).cast<Complex>();
    for (std::size_t i : effective) r.Mi.push_back((Ut * sys.A(i + 1) * bases.V).cast<Complex>());
    r.Cv = (sys.C() * bases.V).cast<Complex>();
    r.Ub = (Ut * sys.B()).cast<Complex>();
    return r;
}

double sigma_at(const ReducedBlocks& r, const std::vector<double>& angles) {
    CMatrix M = r.M0;
    for (std::size_t l = 0; l < r.Mi.size(); ++l) M -= r.Mi[l] * std::polar(1.0, -angles[l]);
    Eigen::PartialPivLU<CMatrix> lu(M);
    if (!(lu.rcond() > 1e-14)) return std::numeric_limits<double>::infinity();
    return sigma_max(r.Cv * lu.solve(r.Ub));
}

ThetaPoint expand(const std::vector<double>& eff_angles, const std::vector<std::size_t>& effective,
                  std::size_t m) {
    ThetaPoint p;
    p.theta.assign(m, 0.0);
    for (std::size_t l = 0; l < effective.size(); ++l) p.theta[effective[l]] = eff_angles[l];
    return p;
}

}  // namespace

PeakFamily asymptotic_family(const DdaeSystem& sys, const NullspaceBases& bases,
                             const std::vector<std::size_t>& effective) {
    auto blocks = std::make_shared<ReducedBlocks>(reduce(sys, bases, effective));
    PeakFamily f;
    f.dim = bases.v;
    f.num_params = static_cast<Eigen::Index>(effective.size());
    f.M = [blocks](const Vector& s) {
        CMatrix M = blocks->M0;
        for (std::size_t l = 0; l < blocks->Mi.size(); ++l) {
            M -= blocks->Mi[l] * std::polar(1.0, -s(static_cast<Eigen::Index>(l)));
        }
        return M;
    };
    // d/dtheta of -M_l e^{-j theta} is j e^{-j theta} M_l
    f.dM = [blocks](const Vector& s, Eigen::Index l) {
        return CMatrix(blocks->Mi[static_cast<std::size_t>(l)] *
                       (Complex(0.0, 1.0) * std::polar(1.0, -s(l))));
    };
    f.d2M = [blocks](const Vector& s, Eigen::Index l, Eigen::Index q) {
        if (l != q) return CMatrix(CMatrix::Zero(blocks->M0.rows(), blocks->M0.cols()));
        return CMatrix(blocks->Mi[static_cast<std::size_t>(l)] * std::polar(1.0, -s(l)));
    };
    f.P = (blocks->Ub * blocks->Ub.adjoint()).real();
    f.Q = (blocks->Cv.adjoint() * blocks->Cv).real();
    return f;
}

GridSweepResult grid_sweep(const DdaeSystem& sys, const NullspaceBases& bases,
                           int points_per_dim, std::size_t max_grid_points) {
    GridSweepResult out;
    const std::size_t m = sys.num_delays();
    out.theta_best.theta.assign(bases.v == 0 ? 0 : m, 0.0);
    if (bases.v == 0) return out;

    const auto effective = effective_delays(sys, bases);
    const ReducedBlocks r = reduce(sys, bases, effective);
    const std::size_t d = effective.size();

    std::size_t K = static_cast<std::size_t>(std::max(1, points_per_dim));
    while (d > 0 && K > 2 && std::pow(static_cast<double>(K), static_cast<double>(d)) >
                                 static_cast<double>(max_grid_points)) {
        --K;
    }
    std::size_t total = 1;
    for (std::size_t l = 0; l < d; ++l) total *= K;

    std::vector<double> values(total);
    std::vector<std::size_t> digits(d, 0);
    std::vector<double> angles(d, 0.0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (std::size_t l = 0; l < d; ++l) {
            digits[l] = rem % K;
            rem /= K;
            angles[l] = kTwoPi * static_cast<double>(digits[l]) / static_cast<double>(K);
        }
        values[idx] = sigma_at(r, angles);
    }
    const auto best = std::max_element(values.begin(), values.end());
    out.value = *best;

    auto point_of = [&](std::size_t idx) {
        std::vector<double> a(d);
        for (std::size_t l = 0; l < d; ++l) {
            a[l] = kTwoPi * static_cast<double>(idx % K) / static_cast<double>(K);
            idx /= K;
        }
        return expand(a, effective, m);
    };
    out.theta_best = point_of(static_cast<std::size_t>(best - values.begin()));
    if (std::isfinite(out.value) && out.value > 0.0) {
        for (std::size_t idx = 0; idx < total && out.near_maxima.size() < 16; ++idx) {
            if (values[idx] >= out.value * (1.0 - 1e-6)) out.near_maxima.push_back(point_of(idx));
        }
    }
    return out;
}

AsymNormResult correct_asym(const DdaeSystem& sys, const NullspaceBases& bases,
                            const ThetaPoint& theta0, double xi0, const AsymNormOptions& opts) {
    AsymNormResult out;
    out.grid_value = xi0;
    out.value = xi0;
    out.theta_hat = theta0;
    out.effective = effective_delays(sys, bases);
    if (bases.v == 0 || !(xi0 > 0.0)) {
        out.converged = true;
        out.stationarity = Vector::Zero(static_cast<Eigen::Index>(out.effective.size()));
        return out;
    }

    const PeakFamily fam = asymptotic_family(sys, bases, out.effective);
    Vector s(static_cast<Eigen::Index>(out.effective.size()));
    for (std::size_t l = 0; l < out.effective.size(); ++l) {
        s(static_cast<Eigen::Index>(l)) = theta0.theta[out.effective[l]];
    }

    const Vector sv = singular_values(eval_Ta_theta(sys, bases, theta0).matrix);
    out.multiple_singular = sv.size() > 1 && sv(1) > sv(0) * (1.0 - 1e-8);

    PeakResult res = correct_peak(fam, start_from_min_singular(fam, s, xi0), opts.max_iter, opts.tol);
    out.iterations = res.iterations;
    out.residual = res.residual;
    out.stationarity = res.stationarity;

    ThetaPoint hat = theta0;
    for (std::size_t l = 0; l < out.effective.size(); ++l) {
        hat.theta[out.effective[l]] = wrap_angle(res.state.s(static_cast<Eigen::Index>(l)));
    }
    // The corrector may land on a smaller singular value; only accept a
    // solution that is sigma_1 at its own angle and not below the grid value.
    const double check = eval_Ta_theta(sys, bases, hat).sigma1;
    const bool is_top = std::abs(check - res.state.xi) <= 1e-8 * std::max(1.0, check);
    if (res.converged && is_top && res.state.xi >= xi0 - 1e-12 * std::max(1.0, xi0)) {
        out.value = std::max(res.state.xi, xi0);
        out.theta_hat = hat;
        out.u_a = res.state.u;
        out.v_a = res.state.v;
        out.converged = true;
    } else {
        // keep the grid point; singular vectors from the start rule
        const PeakState st = start_from_min_singular(fam, s, xi0);
        out.u_a = st.u;
        out.v_a = st.v;
        out.converged = false;
    }
    return out;
}

AsymNormResult strong_norm_Ta(const DdaeSystem& sys, const NullspaceBases& bases,
                              const AsymNormOptions& opts) {
    const GridSweepResult grid = grid_sweep(sys, bases, opts.points_per_dim, opts.max_grid_points);
    if (!std::isfinite(grid.value)) {
        throw CausalityViolation("asymptotic matrix is singular on the angle grid");
    }
    if (grid.value == 0.0) {
        AsymNormResult out = correct_asym(sys, bases, grid.theta_best, 0.0, opts);
        out.converged = true;
        return out;
    }

    std::vector<ThetaPoint> starts = grid.near_maxima;
    if (starts.empty()) starts.push_back(grid.theta_best);

    AsymNormResult best;
    bool have = false;
    for (const auto& start : starts) {
        AsymNormResult r = correct_asym(sys, bases, start, grid.value, opts);
        if (!have || (r.converged && !best.converged) ||
            (r.converged == best.converged && r.value > best.value)) {
            best = std::move(r);
            have = true;
        }
    }
    if (best.multiple_singular && !best.converged) {
        // restart once from a perturbed angle
        ThetaPoint p = best.theta_hat;
        for (std::size_t i : best.effective) p.theta[i] = wrap_angle(p.theta[i] + 1e-3);
        const double xi = eval_Ta_theta(sys, bases, p).sigma1;
        AsymNormResult r = correct_asym(sys, bases, p, xi, opts);
        if (r.converged && r.value >= best.value) {
            r.multiple_singular = true;
            r.grid_value = grid.value;
            best = std::move(r);
        }
    }
    best.grid_value = grid.value;
    best.value = std::max(best.value, grid.value);
    return best;
}

}  // namespace shinf
