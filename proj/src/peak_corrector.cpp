#include "shinf/peak_corrector.hpp"

#include <cmath>

namespace shinf {

namespace {

Eigen::Index largest_entry(const CVector& u) {
    Eigen::Index k = 0;
    u.cwiseAbs().maxCoeff(&k);
    return k;
}

// Writes the real representation of the complex-linear map L into J.
void put_linear(Matrix& J, Eigen::Index row, Eigen::Index col, const CMatrix& L) {
    const Eigen::Index r = L.rows();
    const Eigen::Index c = L.cols();
    J.block(row, col, r, c) += L.real();
    J.block(row, col + c, r, c) -= L.imag();
    J.block(row + r, col, r, c) += L.imag();
    J.block(row + r, col + c, r, c) += L.real();
}

void put_vector(Matrix& J, Eigen::Index row, Eigen::Index col, const CVector& x) {
    const Eigen::Index r = x.size();
    J.block(row, col, r, 1) += x.real();
    J.block(row + r, col, r, 1) += x.imag();
}

struct Layout {
    Eigen::Index d, m;
    Eigen::Index rows() const { return 4 * d + 2 + m; }
    Eigen::Index cols() const { return 4 * d + m + 1; }
};

Vector pack(const PeakState& st) {
    const Eigen::Index d = st.u.size();
    const Eigen::Index m = st.s.size();
    Vector z(4 * d + m + 1);
    z.segment(0, d) = st.u.real();
    z.segment(d, d) = st.u.imag();
    z.segment(2 * d, d) = st.v.real();
    z.segment(3 * d, d) = st.v.imag();
    z.segment(4 * d, m) = st.s;
    z(4 * d + m) = st.xi;
    return z;
}

PeakState unpack(const Vector& z, Eigen::Index d, Eigen::Index m) {
    PeakState st;
    st.u = z.segment(0, d).cast<Complex>() + Complex(0, 1) * z.segment(d, d).cast<Complex>();
    st.v = z.segment(2 * d, d).cast<Complex>() +
           Complex(0, 1) * z.segment(3 * d, d).cast<Complex>();
    st.s = z.segment(4 * d, m);
    st.xi = z(4 * d + m);
    return st;
}

Vector residual(const PeakFamily& f, const PeakState& st, Eigen::Index k) {
    const Layout L{f.dim, f.num_params};
    const Eigen::Index d = L.d;
    Vector F(L.rows());
    const CMatrix M = f.M(st.s);
    const CMatrix P = f.P.cast<Complex>();
    const CMatrix Q = f.Q.cast<Complex>();
    const CVector F1 = M * st.u - P * st.v / st.xi;
    const CVector F2 = Q * st.u / st.xi - M.adjoint() * st.v;
    F.segment(0, d) = F1.real();
    F.segment(d, d) = F1.imag();
    F.segment(2 * d, d) = F2.real();
    F.segment(3 * d, d) = F2.imag();
    F(4 * d) = st.u.squaredNorm() + st.v.squaredNorm() - 2.0;
    F(4 * d + 1) = st.u(k).imag();
    for (Eigen::Index l = 0; l < L.m; ++l) {
        F(4 * d + 2 + l) = (st.v.adjoint() * f.dM(st.s, l) * st.u)(0).real();
    }
    return F;
}

Matrix jacobian(const PeakFamily& f, const PeakState& st, Eigen::Index k) {
    const Layout L{f.dim, f.num_params};
    const Eigen::Index d = L.d;
    const Eigen::Index m = L.m;
    const Eigen::Index col_u = 0, col_v = 2 * d, col_s = 4 * d, col_xi = 4 * d + m;
    Matrix J = Matrix::Zero(L.rows(), L.cols());

    const CMatrix M = f.M(st.s);
    const CMatrix P = f.P.cast<Complex>();
    const CMatrix Q = f.Q.cast<Complex>();
    const double xi = st.xi;

    // F1 = M u - P v / xi
    put_linear(J, 0, col_u, M);
    put_linear(J, 0, col_v, -P / xi);
    put_vector(J, 0, col_xi, P * st.v / (xi * xi));
    // F2 = Q u / xi - M^* v
    put_linear(J, 2 * d, col_u, Q / xi);
    put_linear(J, 2 * d, col_v, -M.adjoint());
    put_vector(J, 2 * d, col_xi, -Q * st.u / (xi * xi));

    std::vector<CMatrix> dM;
    dM.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index l = 0; l < m; ++l) {
        dM.push_back(f.dM(st.s, l));
        put_vector(J, 0, col_s + l, dM.back() * st.u);
        put_vector(J, 2 * d, col_s + l, -dM.back().adjoint() * st.v);
    }

    // normalization and phase gauge
    const Eigen::Index rn = 4 * d;
    J.block(rn, 0, 1, d) = 2.0 * st.u.real().transpose();
    J.block(rn, d, 1, d) = 2.0 * st.u.imag().transpose();
    J.block(rn, 2 * d, 1, d) = 2.0 * st.v.real().transpose();
    J.block(rn, 3 * d, 1, d) = 2.0 * st.v.imag().transpose();
    J(rn + 1, d + k) = 1.0;

    // stationarity Re(v^* dM_l u)
    for (Eigen::Index l = 0; l < m; ++l) {
        const Eigen::Index r = 4 * d + 2 + l;
        const Eigen::RowVectorXcd left = st.v.adjoint() * dM[static_cast<std::size_t>(l)];
        const CVector right = dM[static_cast<std::size_t>(l)] * st.u;
        J.block(r, 0, 1, d) = left.real();
        J.block(r, d, 1, d) = -left.imag();
        J.block(r, 2 * d, 1, d) = right.real().transpose();
        J.block(r, 3 * d, 1, d) = right.imag().transpose();
        for (Eigen::Index q = 0; q < m; ++q) {
            J(r, col_s + q) = (st.v.adjoint() * f.d2M(st.s, l, q) * st.u)(0).real();
        }
    }
    return J;
}

}  // namespace

CMatrix peak_matrix(const PeakFamily& f, const Vector& s, double xi) {
    const Eigen::Index d = f.dim;
    const CMatrix M = f.M(s);
    CMatrix H(2 * d, 2 * d);
    H.topLeftCorner(d, d) = M;
    H.topRightCorner(d, d) = -f.P.cast<Complex>() / xi;
    H.bottomLeftCorner(d, d) = f.Q.cast<Complex>() / xi;
    H.bottomRightCorner(d, d) = -M.adjoint();
    return H;
}

void normalize_gauge(PeakState& st) {
    const double scale = std::sqrt(st.u.squaredNorm() + st.v.squaredNorm());
    if (scale > 0.0) {
        st.u *= std::sqrt(2.0) / scale;
        st.v *= std::sqrt(2.0) / scale;
    }
    if (st.u.size() == 0) return;
    const Complex lead = st.u(largest_entry(st.u));
    if (std::abs(lead) > 0.0) {
        const Complex phase = std::conj(lead) / std::abs(lead);
        st.u *= phase;
        st.v *= phase;
    }
}

PeakState start_from_min_singular(const PeakFamily& f, const Vector& s, double xi) {
    const Eigen::Index d = f.dim;
    Eigen::JacobiSVD<CMatrix> svd(peak_matrix(f, s, xi), Eigen::ComputeFullV);
    const CVector x = svd.matrixV().col(2 * d - 1);
    PeakState st;
    st.u = x.head(d);
    st.v = x.tail(d);
    st.s = s;
    st.xi = xi;
    normalize_gauge(st);
    return st;
}

Vector peak_residual(const PeakFamily& f, const PeakState& st, Eigen::Index gauge_index) {
    return residual(f, st, gauge_index);
}

PeakResult correct_peak(const PeakFamily& f, PeakState start, int max_iter, double tol) {
    normalize_gauge(start);
    const Eigen::Index d = f.dim;
    const Eigen::Index m = f.num_params;
    const Eigen::Index k = largest_entry(start.u);

    PeakResult out;
    PeakState st = start;
    Vector F = residual(f, st, k);
    double rnorm = F.norm();
    // rounding floor of the residual grows with the matrix entries
    const CMatrix M0 = f.M(st.s);
    const double scale = 1.0 + M0.norm() + (f.P.norm() + f.Q.norm()) / st.xi;
    const double target = tol * scale;
    bool stalled = false;
    int it = 0;
    for (; it < max_iter && rnorm > target; ++it) {
        const Matrix J = jacobian(f, st, k);
        const Vector step = J.colPivHouseholderQr().solve(-F);
        if (!step.allFinite()) break;
        const Vector z = pack(st);
        double alpha = 1.0;
        bool accepted = false;
        for (int h = 0; h < 30; ++h, alpha *= 0.5) {
            PeakState trial = unpack(z + alpha * step, d, m);
            if (!(trial.xi > 0.0)) continue;
            const Vector Ft = residual(f, trial, k);
            const double tn = Ft.norm();
            if (std::isfinite(tn) && tn < rnorm) {
                st = trial;
                F = Ft;
                rnorm = tn;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            stalled = true;
            break;
        }
    }
    out.state = st;
    out.iterations = it;
    out.residual = rnorm;
    out.converged = rnorm <= target || (stalled && rnorm <= 1e3 * target);
    out.stationarity = F.tail(m);
    return out;
}

}  // namespace shinf
