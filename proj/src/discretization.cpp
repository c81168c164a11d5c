#include "shinf/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shinf/linalg.hpp"

namespace shinf {

std::vector<double> chebyshev_points(int N) {
    std::vector<double> x(static_cast<std::size_t>(N) + 1);
    for (int k = 0; k <= N; ++k) x[static_cast<std::size_t>(k)] = std::cos(kPi * k / N);
    return x;
}

Matrix chebyshev_diff_matrix(int N) {
    const auto x = chebyshev_points(N);
    Matrix D = Matrix::Zero(N + 1, N + 1);
    auto c = [N](int i) { return (i == 0 || i == N) ? 2.0 : 1.0; };
    for (int i = 0; i <= N; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j <= N; ++j) {
            if (i == j) continue;
            const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            D(i, j) = c(i) / c(j) * sign /
                      (x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]);
            rowsum += D(i, j);
        }
        // negative-sum trick keeps D * ones = 0 to rounding
        D(i, i) = -rowsum;
    }
    return D;
}

Vector barycentric_row(const std::vector<double>& nodes, double t) {
    const Eigen::Index n = static_cast<Eigen::Index>(nodes.size());
    Vector row = Vector::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        if (t == nodes[static_cast<std::size_t>(j)]) {
            row(j) = 1.0;
            return row;
        }
    }
    double denom = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        double w = (j % 2 == 0) ? 1.0 : -1.0;
        if (j == 0 || j == n - 1) w *= 0.5;
        row(j) = w / (t - nodes[static_cast<std::size_t>(j)]);
        denom += row(j);
    }
    return row / denom;
}

DiscretizedSystem discretize(const DdaeSystem& sys, int N) {
    if (N < 2) throw std::invalid_argument("discretization order N must be at least 2");
    const Eigen::Index n = sys.n();
    const Eigen::Index big = (N + 1) * n;
    const double tau_max = sys.num_delays() > 0 ? sys.delays().max() : 1.0;

    DiscretizedSystem d;
    d.N = N;
    d.n = n;
    const auto x = chebyshev_points(N);
    d.mesh.reserve(x.size());
    for (double xi : x) d.mesh.push_back(0.5 * tau_max * (xi - 1.0));

    d.EN = Matrix::Zero(big, big);
    d.AN = Matrix::Zero(big, big);
    d.BN = Matrix::Zero(big, sys.inputs());
    d.CN = Matrix::Zero(sys.outputs(), big);

    // boundary block: the DDAE at theta = 0, delayed values interpolated
    d.EN.topLeftCorner(n, n) = sys.E();
    d.AN.topLeftCorner(n, n) = sys.A(0);
    for (std::size_t i = 0; i < sys.num_delays(); ++i) {
        const double xs = 1.0 - 2.0 * sys.tau(i) / tau_max;  // -tau_i mapped to [-1, 1]
        const Vector l = barycentric_row(x, xs);
        for (int j = 0; j <= N; ++j) {
            if (l(j) != 0.0) d.AN.block(0, j * n, n, n) += l(j) * sys.A(i + 1);
        }
    }
    d.BN.topRows(n) = sys.B();
    d.CN.leftCols(n) = sys.C();

    // transport blocks: phi' = d phi / d theta at the interior/left nodes
    const Matrix D = chebyshev_diff_matrix(N) * (2.0 / tau_max);
    for (int k = 1; k <= N; ++k) {
        d.EN.block(k * n, k * n, n, n).setIdentity();
        for (int j = 0; j <= N; ++j) {
            if (D(k, j) != 0.0) d.AN.block(k * n, j * n, n, n).diagonal().setConstant(D(k, j));
        }
    }
    return d;
}

FrequencyResponse eval_TN(const DiscretizedSystem& dsys, Complex lambda) {
    FrequencyResponse out;
    out.lambda = lambda;
    const CMatrix M = lambda * dsys.EN.cast<Complex>() - dsys.AN.cast<Complex>();
    Eigen::PartialPivLU<CMatrix> lu(M);
    if (!(lu.rcond() > 1e-14)) {
        throw TransmissionPole("discretized resolvent is singular", lambda);
    }
    out.matrix = dsys.CN.cast<Complex>() * lu.solve(dsys.BN.cast<Complex>());
    out.sigma1 = sigma_max(out.matrix);
    return out;
}

namespace {

double radius_at(const Eigen::PartialPivLU<Matrix>& lu0, const std::vector<Matrix>& Mi,
                 const std::vector<double>& angles) {
    CMatrix S = CMatrix::Zero(Mi.front().rows(), Mi.front().cols());
    for (std::size_t l = 0; l < Mi.size(); ++l) {
        S += lu0.solve(Mi[l]).cast<Complex>() * std::polar(1.0, angles[l]);
    }
    if (S.rows() == 1) return std::abs(S(0, 0));
    Eigen::ComplexEigenSolver<CMatrix> es(S, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

double difference_radius(const DdaeSystem& sys, const NullspaceBases& bases) {
    if (bases.v == 0) return 0.0;
    const auto effective = effective_delays(sys, bases);
    if (effective.empty()) return 0.0;
    const Matrix Ut = bases.U.transpose();
    Eigen::PartialPivLU<Matrix> lu0(Ut * sys.A(0) * bases.V);
    std::vector<Matrix> Mi;
    for (std::size_t i : effective) Mi.push_back(Ut * sys.A(i + 1) * bases.V);

    const std::size_t d = Mi.size();
    std::size_t K = 24;
    while (d > 0 && K > 4 && std::pow(static_cast<double>(K), static_cast<double>(d)) > 2e5) --K;
    std::size_t total = 1;
    for (std::size_t l = 0; l < d; ++l) total *= K;

    std::vector<double> angles(d), best_angles(d);
    double best = -1.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (std::size_t l = 0; l < d; ++l) {
            angles[l] = kTwoPi * static_cast<double>(rem % K) / static_cast<double>(K);
            rem /= K;
        }
        const double r = radius_at(lu0, Mi, angles);
        if (r > best) {
            best = r;
            best_angles = angles;
        }
    }

    // coordinate-wise golden-section refinement around the best grid point
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double h = kTwoPi / static_cast<double>(K);
    for (int sweep = 0; sweep < 6; ++sweep) {
        for (std::size_t l = 0; l < d; ++l) {
            double a = best_angles[l] - h, b = best_angles[l] + h;
            auto f = [&](double t) {
                auto tmp = best_angles;
                tmp[l] = t;
                return radius_at(lu0, Mi, tmp);
            };
            double c = b - gr * (b - a), e = a + gr * (b - a);
            double fc = f(c), fe = f(e);
            for (int it = 0; it < 40; ++it) {
                if (fc > fe) {
                    b = e;
                    e = c;
                    fe = fc;
                    c = b - gr * (b - a);
                    fc = f(c);
                } else {
                    a = c;
                    c = e;
                    fc = fe;
                    e = a + gr * (b - a);
                    fe = f(e);
                }
            }
            const double t = 0.5 * (a + b);
            const double ft = f(t);
            if (ft > best) {
                best = ft;
                best_angles[l] = t;
            }
        }
        h *= 0.5;
    }
    return best;
}

StabilityReport strong_stability_check(const DdaeSystem& sys, const NullspaceBases& bases, int N) {
    StabilityReport rep;
    rep.causal = check_causality(sys, bases);
    if (!rep.causal) {
        rep.abscissa = std::numeric_limits<double>::quiet_NaN();
        rep.delta_radius = std::numeric_limits<double>::infinity();
        return rep;
    }
    const DiscretizedSystem d = discretize(sys, N);
    rep.abscissa = spectral_abscissa(d.AN, d.EN);
    rep.delta_radius = difference_radius(sys, bases);
    rep.stable = rep.abscissa < -1e-8 && rep.delta_radius < 1.0;
    return rep;
}

}  // namespace shinf
