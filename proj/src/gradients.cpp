#include "shinf/gradients.hpp"

#include <cmath>
#include <limits>

namespace shinf {

GradientResult grad_strong_hinf(const AffineDdae& tmpl, const Vector& p, const NormCertificate& cert) {
    if (static_cast<std::size_t>(p.size()) != tmpl.num_params()) {
        throw DimensionError("parameter vector length does not match the template");
    }
    if (cert.u.size() == 0 || cert.v.size() == 0) {
        if (cert.value == 0.0) {
            // zero norm: every parameter direction is flat at this point
            return GradientResult{Vector::Zero(p.size()), cert.kind, cert.simple};
        }
        throw std::invalid_argument("certificate carries no singular vectors");
    }
    const DdaeSystem& base = tmpl.base;
    const double xi = cert.value;
    GradientResult out;
    out.branch = cert.kind;
    out.smooth = cert.simple && cert.corrected;
    out.grad = Vector::Zero(p.size());

    // rescale to the gauge |u|^2 + |v|^2 = 2; the formula is invariant to a
    // common scale but the guard below is not
    const double scale = std::sqrt(2.0 / (cert.u.squaredNorm() + cert.v.squaredNorm()));
    const CVector u = cert.u * scale;
    const CVector v = cert.v * scale;

    std::vector<Complex> phase(base.num_delays());
    Matrix L, R;  // projections applied to every dA block
    double denom;
    if (cert.kind == Branch::Frequency) {
        for (std::size_t i = 0; i < phase.size(); ++i) {
            phase[i] = std::polar(1.0, -cert.omega_hat * base.tau(i));
        }
        const CVector Bv = base.B().transpose().cast<Complex>() * v;
        const CVector Cu = base.C().cast<Complex>() * u;
        denom = Bv.squaredNorm() + Cu.squaredNorm();
    } else {
        const NullspaceBases nb = compute_nullspaces(base);
        L = nb.U.transpose();
        R = nb.V;
        for (std::size_t i = 0; i < phase.size(); ++i) {
            const double th = i < cert.theta_hat.theta.size() ? cert.theta_hat.theta[i] : 0.0;
            phase[i] = std::polar(1.0, -th);
        }
        const CVector Bv = (nb.U.transpose() * base.B()).transpose().cast<Complex>() * v;
        const CVector Cu = (base.C() * nb.V).cast<Complex>() * u;
        denom = Bv.squaredNorm() + Cu.squaredNorm();
    }
    if (!(denom > 1e-300)) {
        out.smooth = false;
        return out;
    }

    for (std::size_t k = 0; k < tmpl.num_params(); ++k) {
        const auto& dk = tmpl.dA[k];
        CMatrix dM = CMatrix::Zero(u.size(), u.size());
        for (std::size_t i = 0; i < dk.size(); ++i) {
            if (dk[i].isZero(0.0)) continue;
            const Matrix blk = cert.kind == Branch::Frequency ? dk[i] : Matrix(L * dk[i] * R);
            const Complex ph = i == 0 ? Complex(1.0, 0.0) : phase[i - 1];
            dM -= blk.cast<Complex>() * ph;
        }
        const Complex vMu = v.dot(dM * u);  // v^* dM u
        out.grad(static_cast<Eigen::Index>(k)) = -2.0 * xi * xi * vMu.real() / denom;
    }
    return out;
}

FiniteDiffReport finite_diff_check(const AffineDdae& tmpl, const Vector& p, double step,
                                   const NormOptions& opts) {
    FiniteDiffReport rep;
    const NormCertificate cert = strong_hinf(substitute_parameters(tmpl, p), opts);
    const GradientResult g = grad_strong_hinf(tmpl, p, cert);
    rep.value = cert.value;
    rep.analytic = g.grad;
    rep.smooth = g.smooth;
    rep.branch = g.branch;
    rep.numeric = Vector::Zero(p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        const double h = step * (1.0 + std::abs(p(k)));
        Vector pp = p, pm = p;
        pp(k) += h;
        pm(k) -= h;
        const double fp = strong_hinf(substitute_parameters(tmpl, pp), opts).value;
        const double fm = strong_hinf(substitute_parameters(tmpl, pm), opts).value;
        rep.numeric(k) = (fp - fm) / (2.0 * h);
    }
    const Vector diff = rep.analytic - rep.numeric;
    rep.max_abs_error = p.size() ? diff.cwiseAbs().maxCoeff() : 0.0;
    const double ref = p.size() ? rep.numeric.cwiseAbs().maxCoeff() : 0.0;
    rep.max_rel_error = ref > 0.0 ? rep.max_abs_error / ref
                                  : (rep.max_abs_error == 0.0 ? 0.0
                                                              : std::numeric_limits<double>::infinity());
    return rep;
}

}  // namespace shinf
