#include "shinf/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "shinf/linalg.hpp"

namespace shinf {

const char* to_string(Branch b) {
    return b == Branch::Asymptotic ? "asymptotic" : "frequency";
}

std::vector<double> crossing_frequencies(const DiscretizedSystem& dsys, double xi) {
    if (!(xi > 0.0)) throw std::invalid_argument("crossing level must be positive");
    const Eigen::Index k = dsys.AN.rows();
    Matrix S = Matrix::Zero(2 * k, 2 * k);
    Matrix T = Matrix::Zero(2 * k, 2 * k);
    S.topLeftCorner(k, k) = dsys.AN;
    S.topRightCorner(k, k) = dsys.BN * dsys.BN.transpose() / xi;
    S.bottomLeftCorner(k, k) = -dsys.CN.transpose() * dsys.CN / xi;
    S.bottomRightCorner(k, k) = -dsys.AN.transpose();
    T.topLeftCorner(k, k) = dsys.EN;
    T.bottomRightCorner(k, k) = dsys.EN.transpose();

    std::vector<double> omegas;
    for (const Complex& l : finite_generalized_eigenvalues(S, T)) {
        if (std::abs(l.real()) <= 1e-7 * (1.0 + std::abs(l.imag()))) {
            omegas.push_back(std::abs(l.imag()));
        }
    }
    std::sort(omegas.begin(), omegas.end());
    std::vector<double> out;
    for (double w : omegas) {
        if (out.empty() || w - out.back() > 1e-8 * (1.0 + w)) out.push_back(w);
    }
    return out;
}

namespace {

double sigma_N(const DiscretizedSystem& dsys, double omega) {
    try {
        return eval_TN(dsys, Complex(0.0, omega)).sigma1;
    } catch (const TransmissionPole&) {
        return 0.0;
    }
}

struct Probe {
    double value = -1.0;
    double omega = 0.0;
};

void probe(const DiscretizedSystem& dsys, double omega, Probe& best,
           std::vector<double>* points = nullptr) {
    const double s = sigma_N(dsys, omega);
    if (points) points->push_back(omega);
    if (s > best.value) {
        best.value = s;
        best.omega = omega;
    }
}

// Test frequencies between consecutive crossings plus the outer guards.
std::vector<double> midpoints(const std::vector<double>& w) {
    std::vector<double> mu;
    if (w.empty()) return mu;
    if (w.front() > 0.0) {
        mu.push_back(0.0);
        mu.push_back(w.front() / std::sqrt(2.0));
    }
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        mu.push_back(w[i] > 0.0 ? std::sqrt(w[i] * w[i + 1]) : 0.5 * w[i + 1]);
    }
    mu.push_back(w.back() > 0.0 ? 2.0 * w.back() : 1.0);
    return mu;
}

}  // namespace

Prediction predict(const DdaeSystem& sys, const DiscretizedSystem& dsys, double ta_norm, double tol,
                   int max_iter) {
    (void)sys;
    Prediction out;
    double level = ta_norm;
    bool level_is_ta = true;
    std::vector<double> cached;
    Probe attained;

    if (!(ta_norm > 0.0)) {
        // nothing to start from: sample T_N on a coarse grid
        Probe p;
        probe(dsys, 0.0, p);
        for (double w : logspace(1e-3, 1e3, 25)) probe(dsys, w, p);
        if (!(p.value > 0.0)) {
            out.asymptotic = true;
            out.xi_tilde = ta_norm;
            return out;
        }
        level = p.value;
        level_is_ta = false;
        attained = p;
        cached.push_back(p.omega);
    }
    out.history.push_back(level);

    for (int it = 0; it < max_iter; ++it) {
        out.iterations = it + 1;
        const double xi = level * (1.0 + 2.0 * tol);
        const std::vector<double> w = crossing_frequencies(dsys, xi);
        if (w.empty()) {
            if (level_is_ta) {
                out.asymptotic = true;
                out.xi_tilde = ta_norm;
                return out;
            }
            out.xi_tilde = 0.5 * (xi + level);
            out.candidates = cached;
            if (attained.value >= 0.0) out.candidates.push_back(attained.omega);
            break;
        }
        out.crossing_bound = std::max(out.crossing_bound, w.back());
        cached = w;

        Probe best;
        for (double mu : midpoints(w)) probe(dsys, mu, best);
        if (!(best.value > xi)) {
            // midpoints missed the excursion: sample each interval more densely
            std::vector<double> edges = w;
            if (edges.front() > 0.0) edges.insert(edges.begin(), 0.0);
            edges.push_back(2.0 * edges.back() + 1.0);
            for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
                for (int k = 1; k < 16; ++k) {
                    probe(dsys, edges[i] + (edges[i + 1] - edges[i]) * k / 16.0, best);
                }
            }
        }
        if (!(best.value > xi)) {
            // crossings without an excursion above the level (tangency or
            // discretization noise): stop here
            out.xi_tilde = 0.5 * (xi + level);
            out.candidates = cached;
            if (attained.value >= 0.0) out.candidates.push_back(attained.omega);
            break;
        }
        attained = best;
        if (best.value >= ta_norm) {
            level = best.value;
            level_is_ta = false;
        } else {
            level = ta_norm;
        }
        out.history.push_back(level);
        if (it + 1 == max_iter) {
            throw NumericalFailure("level-set prediction exceeded " + std::to_string(max_iter) +
                                   " iterations; try a larger tol or N");
        }
    }
    std::sort(out.candidates.begin(), out.candidates.end());
    out.candidates.erase(std::unique(out.candidates.begin(), out.candidates.end()),
                         out.candidates.end());
    return out;
}

PeakFamily frequency_family(const DdaeSystem& sys) {
    auto s = std::make_shared<DdaeSystem>(sys);
    PeakFamily f;
    f.dim = sys.n();
    f.num_params = 1;
    f.M = [s](const Vector& x) { return characteristic_matrix(*s, Complex(0.0, x(0))); };
    // dM/domega = j (E + sum tau_i A_i e^{-j omega tau_i})
    f.dM = [s](const Vector& x, Eigen::Index) {
        CMatrix W = s->E().cast<Complex>();
        for (std::size_t i = 0; i < s->num_delays(); ++i) {
            W += s->A(i + 1).cast<Complex>() * (s->tau(i) * std::polar(1.0, -x(0) * s->tau(i)));
        }
        return CMatrix(Complex(0.0, 1.0) * W);
    };
    f.d2M = [s](const Vector& x, Eigen::Index, Eigen::Index) {
        CMatrix W = CMatrix::Zero(s->n(), s->n());
        for (std::size_t i = 0; i < s->num_delays(); ++i) {
            const double t = s->tau(i);
            W += s->A(i + 1).cast<Complex>() * (t * t * std::polar(1.0, -x(0) * t));
        }
        return W;
    };
    f.P = sys.B() * sys.B().transpose();
    f.Q = sys.C().transpose() * sys.C();
    return f;
}

PeakCorrection correct_peaks(const DdaeSystem& sys, double xi_tilde,
                             const std::vector<double>& candidates, int max_iter) {
    const PeakFamily fam = frequency_family(sys);
    PeakCorrection out;
    bool have = false;
    for (double w0 : candidates) {
        Vector s(1);
        s(0) = w0;
        double start_levels[2] = {xi_tilde, 0.0};
        try {
            start_levels[1] = eval_T(sys, Complex(0.0, w0)).sigma1;
        } catch (const TransmissionPole&) {
            start_levels[1] = 0.0;
        }
        bool accepted = false;
        for (double xi0 : start_levels) {
            if (!(xi0 > 0.0)) continue;
            const PeakResult r = correct_peak(fam, start_from_min_singular(fam, s, xi0), max_iter);
            if (!r.converged) continue;
            const double w = std::abs(r.state.s(0));
            double check;
            try {
                check = eval_T(sys, Complex(0.0, w)).sigma1;
            } catch (const TransmissionPole&) {
                continue;
            }
            if (std::abs(check - r.state.xi) > 1e-8 * std::max(1.0, check)) continue;
            out.peaks.push_back(w);
            out.values.push_back(r.state.xi);
            if (!have || r.state.xi > out.value) {
                out.value = r.state.xi;
                out.omega = w;
                out.u = r.state.u;
                out.v = r.state.v;
                if (r.state.s(0) < 0.0) {
                    // T(-jw) = conj(T(jw)): mirror the vectors
                    out.u = out.u.conjugate().eval();
                    out.v = out.v.conjugate().eval();
                }
                have = true;
            }
            accepted = true;
            break;
        }
        if (!accepted) ++out.dropped;
    }
    out.converged = have;
    return out;
}

NormCertificate strong_hinf(const DdaeSystem& sys, const NormOptions& opts) {
    const NullspaceBases bases = compute_nullspaces(sys);
    if (!check_causality(sys, bases)) {
        throw CausalityViolation("U^T A0 V is singular (smallest singular value " +
                                 std::to_string(causality_margin(sys, bases)) + ")");
    }
    const StabilityReport stab = strong_stability_check(sys, bases, opts.N);
    if (!stab.stable) {
        std::ostringstream msg;
        msg << "system is not strongly exponentially stable (abscissa " << stab.abscissa
            << ", difference radius " << stab.delta_radius << ")";
        throw StrongStabilityViolation(msg.str());
    }

    NormCertificate cert;
    cert.tol = opts.tol;
    const AsymNormResult ta = strong_norm_Ta(sys, bases, opts.asym);
    cert.ta_norm = ta.value;

    int N = opts.N;
    DiscretizedSystem dsys = discretize(sys, N);
    Prediction pred = predict(sys, dsys, ta.value, opts.tol, opts.max_level_iter);
    if (opts.auto_N) {
        while (N < opts.max_N) {
            DiscretizedSystem finer = discretize(sys, 2 * N);
            Prediction p2 = predict(sys, finer, ta.value, opts.tol, opts.max_level_iter);
            const double a = pred.asymptotic ? ta.value : pred.xi_tilde;
            const double b = p2.asymptotic ? ta.value : p2.xi_tilde;
            N *= 2;
            dsys = std::move(finer);
            pred = std::move(p2);
            if (std::abs(a - b) <= 0.1 * opts.tol * std::max(a, b) || (a == 0.0 && b == 0.0)) break;
        }
    }
    cert.N = N;
    cert.iterations = pred.iterations;
    cert.history = pred.history;
    cert.crossing_bound = pred.crossing_bound;
    cert.predicted = pred.asymptotic ? ta.value : pred.xi_tilde;

    auto set_asymptotic = [&]() {
        cert.kind = Branch::Asymptotic;
        cert.value = ta.value;
        cert.theta_hat = ta.theta_hat;
        cert.u = ta.u_a;
        cert.v = ta.v_a;
        cert.corrected = ta.converged;
        cert.simple = !ta.multiple_singular;
    };

    if (pred.asymptotic) {
        set_asymptotic();
        return cert;
    }

    const PeakCorrection pc =
        correct_peaks(sys, pred.xi_tilde, pred.candidates, opts.max_correct_iter);
    double plain = pc.value;
    if (!pc.converged) {
        cert.warnings.push_back("no peak correction converged; reporting the predicted level");
        plain = pred.xi_tilde;
    }

    if (plain <= ta.value * (1.0 + 2.0 * opts.tol)) {
        set_asymptotic();
        return cert;
    }

    cert.kind = Branch::Frequency;
    cert.value = plain;
    cert.corrected = pc.converged;
    if (pc.converged) {
        cert.omega_hat = pc.omega;
        cert.u = pc.u;
        cert.v = pc.v;
        for (std::size_t i = 0; i < pc.peaks.size(); ++i) {
            if (pc.values[i] >= plain * (1.0 - opts.tol)) {
                const double w = pc.peaks[i];
                const bool dup = std::any_of(cert.active_omegas.begin(), cert.active_omegas.end(),
                                             [&](double a) { return std::abs(a - w) <= 1e-6 * (1.0 + w); });
                if (!dup) cert.active_omegas.push_back(w);
            }
        }
        cert.simple = cert.active_omegas.size() <= 1;
        const Vector sv = singular_values(eval_T(sys, Complex(0.0, pc.omega)).matrix);
        if (sv.size() > 1 && sv(1) > sv(0) * (1.0 - 1e-8)) cert.simple = false;
    } else {
        const double w = pred.candidates.empty() ? 0.0 : pred.candidates.front();
        cert.omega_hat = w;
        const PeakFamily fam = frequency_family(sys);
        Vector s(1);
        s(0) = w;
        const PeakState st = start_from_min_singular(fam, s, plain);
        cert.u = st.u;
        cert.v = st.v;
        cert.simple = false;
    }
    return cert;
}

}  // namespace shinf
