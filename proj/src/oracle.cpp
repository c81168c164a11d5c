#include "shinf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace shinf {

namespace {

double sigma_or_zero(const std::function<FrequencyResponse()>& f) {
    try {
        return f().sigma1;
    } catch (const TransmissionPole&) {
        return 0.0;
    }
}

// Maximize f on [a, b] by golden-section search; returns (t, f(t)).
std::pair<double, double> golden_max(const std::function<double(double)>& f, double a, double b,
                                     int iters = 80) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    const double t = 0.5 * (a + b);
    return {t, f(t)};
}

}  // namespace

DenseResult dense_hinf(const DdaeSystem& sys, const DenseSweepSpec& spec) {
    if (spec.points < 2) throw std::invalid_argument("dense sweep needs at least 2 points");
    std::vector<double> grid;
    if (spec.include_zero) grid.push_back(0.0);
    if (spec.log_spaced) {
        const auto g = logspace(spec.omega_min, spec.omega_max, spec.points);
        grid.insert(grid.end(), g.begin(), g.end());
    } else {
        for (int i = 0; i < spec.points; ++i) {
            grid.push_back(spec.omega_min + (spec.omega_max - spec.omega_min) * i / (spec.points - 1));
        }
    }
    auto f = [&](double w) {
        return sigma_or_zero([&] { return eval_T(sys, Complex(0.0, w)); });
    };
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = f(grid[i]);

    // local maxima of the grid, best first
    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const bool left = i == 0 || vals[i] >= vals[i - 1];
        const bool right = i + 1 == grid.size() || vals[i] >= vals[i + 1];
        if (left && right) peaks.push_back(i);
    }
    std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
    if (peaks.size() > 3) peaks.resize(3);

    DenseResult best;
    for (std::size_t i : peaks) {
        if (vals[i] > best.value) {
            best.value = vals[i];
            best.omega = grid[i];
        }
        const double a = i == 0 ? grid[0] : grid[i - 1];
        const double b = i + 1 == grid.size() ? grid[i] : grid[i + 1];
        if (b <= a) continue;
        const auto [t, ft] = golden_max(f, a, b);
        if (ft > best.value) {
            best.value = ft;
            best.omega = t;
        }
    }
    return best;
}

DenseResult dense_ta(const DdaeSystem& sys, const NullspaceBases& bases, const DenseSweepSpec& spec) {
    DenseResult best;
    best.theta.theta.assign(sys.num_delays(), 0.0);
    if (bases.v == 0) return best;
    const auto eff = effective_delays(sys, bases);
    const std::size_t d = eff.size();
    std::size_t K = static_cast<std::size_t>(std::max(2, spec.theta_points));
    while (d > 0 && K > 8 && std::pow(static_cast<double>(K), static_cast<double>(d)) > 4e6) K /= 2;
    std::size_t total = 1;
    for (std::size_t l = 0; l < d; ++l) total *= K;

    ThetaPoint pt;
    pt.theta.assign(sys.num_delays(), 0.0);
    auto f = [&](const ThetaPoint& q) {
        return sigma_or_zero([&] { return eval_Ta_theta(sys, bases, q); });
    };
    best.value = -1.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (std::size_t l = 0; l < d; ++l) {
            pt.theta[eff[l]] = kTwoPi * static_cast<double>(rem % K) / static_cast<double>(K);
            rem /= K;
        }
        const double s = f(pt);
        if (s > best.value) {
            best.value = s;
            best.theta = pt;
        }
    }
    const double h = kTwoPi / static_cast<double>(K);
    for (int sweep = 0; sweep < 4; ++sweep) {
        for (std::size_t l = 0; l < d; ++l) {
            ThetaPoint q = best.theta;
            const double c = q.theta[eff[l]];
            const auto [t, ft] = golden_max(
                [&](double a) {
                    q.theta[eff[l]] = a;
                    return f(q);
                },
                c - h, c + h);
            if (ft > best.value) {
                best.value = ft;
                best.theta.theta[eff[l]] = wrap_angle(t);
            }
        }
    }
    return best;
}

double bb_bisection(const Matrix& A, const Matrix& B, const Matrix& C, double tol) {
    const Eigen::Index n = A.rows();
    Eigen::EigenSolver<Matrix> es(A, false);
    if (n > 0 && es.eigenvalues().real().maxCoeff() >= 0.0) {
        throw StrongStabilityViolation("state matrix is not Hurwitz");
    }
    auto sig = [&](double w) {
        const CMatrix M = Complex(0.0, w) * CMatrix::Identity(n, n) - A.cast<Complex>();
        return sigma_max(C.cast<Complex>() * M.partialPivLu().solve(B.cast<Complex>()));
    };
    // lower bound from a handful of frequencies, upper bound by doubling
    double lo = sig(0.0);
    for (double w : logspace(1e-3, 1e3, 61)) lo = std::max(lo, sig(w));
    if (lo == 0.0) return 0.0;

    auto has_crossing = [&](double g) {
        Matrix H(2 * n, 2 * n);
        H.topLeftCorner(n, n) = A;
        H.topRightCorner(n, n) = B * B.transpose() / g;
        H.bottomLeftCorner(n, n) = -C.transpose() * C / g;
        H.bottomRightCorner(n, n) = -A.transpose();
        Eigen::EigenSolver<Matrix> hs(H, false);
        for (Eigen::Index i = 0; i < 2 * n; ++i) {
            const Complex l = hs.eigenvalues()(i);
            if (std::abs(l.real()) <= 1e-8 * (1.0 + std::abs(l)) ) return true;
        }
        return false;
    };
    double hi = 2.0 * lo;
    while (has_crossing(hi)) hi *= 2.0;
    while (hi - lo > tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (has_crossing(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace shinf
