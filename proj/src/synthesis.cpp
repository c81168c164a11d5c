#include "shinf/synthesis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

namespace shinf {

const char* to_string(Phase p) {
    switch (p) {
        case Phase::Unstable: return "unstable";
        case Phase::Bfgs: return "bfgs";
        case Phase::GradientSampling: return "gradient-sampling";
    }
    return "?";
}

ObjectiveValue objective(const SynthesisProblem& problem, const AffineDdae& tmpl, const Vector& p) {
    if (problem.test_objective) return problem.test_objective(p);
    ObjectiveValue out;
    const DdaeSystem sys = substitute_parameters(tmpl, p);
    try {
        NormCertificate cert = strong_hinf(sys, problem.options.norm);
        const GradientResult g = grad_strong_hinf(tmpl, p, cert);
        out.value = cert.value;
        out.grad = g.grad;
        out.smooth = g.smooth;
        out.cert = std::move(cert);
    } catch (const StrongStabilityViolation&) {
    } catch (const CausalityViolation&) {
    } catch (const NumericalFailure&) {
        // treated as a barrier point like instability
    }
    return out;
}

ObjectiveValue objective(const SynthesisProblem& problem, const Vector& p) {
    if (problem.test_objective) return problem.test_objective(p);
    return objective(problem, interconnect(problem.plant, problem.structure), p);
}

Vector min_norm_convex(const Matrix& G, Vector* weights) {
    const Eigen::Index m = G.cols();
    if (m == 0) throw std::invalid_argument("empty point set");
    const double scale = std::max(1.0, G.colwise().squaredNorm().maxCoeff());
    const double eps = 1e-12;

    Eigen::Index first;
    G.colwise().squaredNorm().minCoeff(&first);
    std::vector<Eigen::Index> S{first};
    std::vector<double> w{1.0};
    Vector x = G.col(first);

    for (int outer = 0; outer < 10 * static_cast<int>(m) + 50; ++outer) {
        Eigen::Index j;
        (G.transpose() * x).minCoeff(&j);
        if (x.squaredNorm() - x.dot(G.col(j)) <= eps * scale) break;
        if (std::find(S.begin(), S.end(), j) != S.end()) break;
        S.push_back(j);
        w.push_back(0.0);

        for (int inner = 0; inner < 10 * static_cast<int>(m) + 50; ++inner) {
            // affine minimizer over the current corral
            const Eigen::Index k = static_cast<Eigen::Index>(S.size());
            Matrix K = Matrix::Zero(k + 1, k + 1);
            Vector rhs = Vector::Zero(k + 1);
            for (Eigen::Index a = 0; a < k; ++a) {
                for (Eigen::Index b = 0; b < k; ++b) K(a, b) = G.col(S[a]).dot(G.col(S[b]));
                K(a, k) = 1.0;
                K(k, a) = 1.0;
            }
            rhs(k) = 1.0;
            const Vector sol = K.completeOrthogonalDecomposition().solve(rhs);
            const Vector alpha = sol.head(k);
            if ((alpha.array() > eps).all()) {
                for (Eigen::Index a = 0; a < k; ++a) w[a] = alpha(a);
                break;
            }
            double theta = 1.0;
            for (Eigen::Index a = 0; a < k; ++a) {
                if (alpha(a) <= eps) theta = std::min(theta, w[a] / (w[a] - alpha(a)));
            }
            for (Eigen::Index a = 0; a < k; ++a) w[a] = (1.0 - theta) * w[a] + theta * alpha(a);
            std::vector<Eigen::Index> S2;
            std::vector<double> w2;
            for (Eigen::Index a = 0; a < k; ++a) {
                if (w[a] > eps) {
                    S2.push_back(S[a]);
                    w2.push_back(w[a]);
                }
            }
            S = std::move(S2);
            w = std::move(w2);
        }
        x = Vector::Zero(G.rows());
        double sum = 0.0;
        for (double v : w) sum += v;
        for (std::size_t a = 0; a < S.size(); ++a) x += (w[a] / sum) * G.col(S[a]);
    }
    if (weights) {
        *weights = Vector::Zero(m);
        double sum = 0.0;
        for (double v : w) sum += v;
        for (std::size_t a = 0; a < S.size(); ++a) (*weights)(S[a]) = w[a] / sum;
    }
    return x;
}

namespace {

struct Evaluator {
    const SynthesisProblem& problem;
    const AffineDdae* tmpl;
    int count = 0;

    ObjectiveValue operator()(const Vector& p) {
        ++count;
        if (problem.test_objective) return problem.test_objective(p);
        return objective(problem, *tmpl, p);
    }
};

struct Point {
    Vector p;
    ObjectiveValue f;
};

// Weak Wolfe line search (bracketing by bisection/doubling). Infinite values
// count as a failed sufficient-decrease test. Returns false on failure.
bool weak_wolfe(Evaluator& eval, const Point& x, const Vector& d, Point& out) {
    const double c1 = 1e-4, c2 = 0.5;
    const double g0 = x.f.grad.dot(d);
    if (!(g0 < 0.0)) return false;
    double lo = 0.0, hi = std::numeric_limits<double>::infinity(), t = 1.0;
    for (int it = 0; it < 40; ++it) {
        Point y{x.p + t * d, {}};
        y.f = eval(y.p);
        if (!y.f.finite() || y.f.value > x.f.value + c1 * t * g0) {
            hi = t;
        } else if (y.f.grad.dot(d) < c2 * g0) {
            lo = t;
            out = y;  // best acceptable-decrease point so far
        } else {
            out = std::move(y);
            return true;
        }
        t = std::isinf(hi) ? 2.0 * lo : 0.5 * (lo + hi);
        if (hi - lo < 1e-14 * (1.0 + t)) break;
    }
    // only sufficient decrease was met: still a decrease step
    return lo > 0.0 && out.f.finite() && out.f.value < x.f.value;
}

void run_bfgs(Evaluator& eval, Point& x, StartTrace& tr, const OptimizerOptions& o) {
    const Eigen::Index d = x.p.size();
    Matrix H = Matrix::Identity(d, d);
    bool scaled = false;
    double best_recent = x.f.value;
    int since_decrease = 0;
    for (int it = 0; it < o.max_iter; ++it) {
        if (x.f.grad.norm() < o.grad_tol) break;
        const Vector dir = -H * x.f.grad;
        Point y;
        if (!weak_wolfe(eval, x, dir, y)) break;
        ++tr.bfgs_iterations;
        const Vector s = y.p - x.p;
        const Vector yv = y.f.grad - x.f.grad;
        const double sy = s.dot(yv);
        if (sy > 1e-16 * s.norm() * yv.norm()) {
            if (!scaled) {
                H *= sy / yv.squaredNorm();
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Matrix I = Matrix::Identity(d, d);
            H = (I - rho * s * yv.transpose()) * H * (I - rho * yv * s.transpose()) + rho * s * s.transpose();
        }
        x = std::move(y);
        tr.values.push_back(x.f.value);
        if (x.f.value < best_recent * (1.0 - 1e-12)) {
            best_recent = x.f.value;
            since_decrease = 0;
        } else if (++since_decrease >= o.stall_iter) {
            break;
        }
    }
}

void run_gradient_sampling(Evaluator& eval, Point& x, StartTrace& tr, const OptimizerOptions& o,
                           std::mt19937_64& rng) {
    const Eigen::Index d = x.p.size();
    const int samples = 2 * static_cast<int>(d) + 1;
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif;
    double measure = std::numeric_limits<double>::infinity();
    for (double eps : o.radii) {
        while (tr.gs_iterations < o.max_gs_iter) {
            ++tr.gs_iterations;
            std::vector<Vector> grads{x.f.grad};
            for (int k = 0; k < samples; ++k) {
                // uniform in the ball of radius eps
                Vector z(d);
                for (Eigen::Index i = 0; i < d; ++i) z(i) = gauss(rng);
                z *= eps * std::pow(unif(rng), 1.0 / static_cast<double>(d)) / std::max(z.norm(), 1e-300);
                const ObjectiveValue f = eval(x.p + z);
                if (f.finite()) grads.push_back(f.grad);
            }
            Matrix G(d, static_cast<Eigen::Index>(grads.size()));
            for (std::size_t k = 0; k < grads.size(); ++k) G.col(static_cast<Eigen::Index>(k)) = grads[k];
            const Vector g = min_norm_convex(G);
            measure = g.norm();
            if (measure < o.stationarity_tol) break;  // next radius

            const Vector dir = -g;
            double t = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
                Point y{x.p + t * dir, {}};
                y.f = eval(y.p);
                if (y.f.finite() && y.f.value < x.f.value - 1e-4 * t * measure * measure) {
                    x = std::move(y);
                    tr.values.push_back(x.f.value);
                    moved = true;
                    break;
                }
            }
            if (!moved) break;  // next radius
        }
        tr.stationarity = measure;
        if (tr.gs_iterations >= o.max_gs_iter) break;
    }
}

StartTrace run_start(const SynthesisProblem& problem, const AffineDdae* tmpl, int index, Eigen::Index dim) {
    const OptimizerOptions& o = problem.options;
    StartTrace tr;
    tr.index = index;
    Evaluator eval{problem, tmpl};
    std::mt19937_64 rng(o.seed + static_cast<std::uint64_t>(index));

    Point x;
    if (static_cast<std::size_t>(index) < problem.initial.size()) {
        x.p = problem.initial[static_cast<std::size_t>(index)];
        x.f = eval(x.p);
        tr.draws = 0;
    } else {
        std::uniform_real_distribution<double> box(-o.box, o.box);
        for (int k = 0; k < o.max_draws; ++k) {
            x.p = Vector(dim);
            for (Eigen::Index i = 0; i < dim; ++i) x.p(i) = box(rng);
            x.f = eval(x.p);
            tr.draws = k + 1;
            if (x.f.finite()) break;
        }
    }
    tr.p0 = x.p;
    tr.p = x.p;
    if (!x.f.finite()) {
        tr.evaluations = eval.count;
        return tr;
    }
    tr.values.push_back(x.f.value);
    tr.phase = Phase::Bfgs;
    run_bfgs(eval, x, tr, o);
    tr.grad_norm = x.f.grad.norm();
    tr.stationarity = tr.grad_norm;
    if (tr.grad_norm >= o.grad_tol || !x.f.smooth) {
        tr.phase = Phase::GradientSampling;
        run_gradient_sampling(eval, x, tr, o, rng);
        tr.grad_norm = x.f.grad.norm();
    }
    tr.p = x.p;
    tr.value = x.f.value;
    if (x.f.cert) tr.branch = x.f.cert->kind;
    tr.evaluations = eval.count;
    return tr;
}

}  // namespace

SynthesisResult optimize(const SynthesisProblem& problem) {
    const OptimizerOptions& o = problem.options;
    const int starts = std::max<int>(o.starts, static_cast<int>(problem.initial.size()));
    if (starts < 1) throw std::invalid_argument("at least one start is required");

    std::optional<AffineDdae> tmpl;
    Eigen::Index dim;
    if (problem.test_objective) {
        if (problem.initial.empty()) throw std::invalid_argument("test objective needs an initial point");
        dim = problem.initial.front().size();
    } else {
        tmpl = interconnect(problem.plant, problem.structure);
        dim = static_cast<Eigen::Index>(problem.structure.num_params());
    }
    for (const Vector& p : problem.initial) {
        if (p.size() != dim) throw DimensionError("initial point has the wrong dimension");
    }

    SynthesisResult res;
    res.traces.resize(static_cast<std::size_t>(starts));
    unsigned workers = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(starts));
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(starts));
    auto work = [&] {
        for (int i = next++; i < starts; i = next++) {
            try {
                res.traces[static_cast<std::size_t>(i)] = run_start(problem, tmpl ? &*tmpl : nullptr, i, dim);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    for (const StartTrace& tr : res.traces) {
        if (tr.value < res.best_value) {
            res.best_value = tr.value;
            res.best_p = tr.p;
            res.best_start = tr.index;
        }
    }
    if (res.best_start < 0) {
        throw NoStabilizingStart(
            "no start yields a strongly stable closed loop; supply a stabilizing initial controller");
    }
    if (!problem.test_objective) {
        const ObjectiveValue f = objective(problem, *tmpl, res.best_p);
        res.best_value = f.value;
        res.cert = f.cert;
    }
    return res;
}

std::string multistart_report(const SynthesisResult& result) {
    if (result.traces.empty()) throw std::invalid_argument("no start traces to report");
    std::ostringstream os;
    os << std::left << std::setw(6) << "start" << std::setw(16) << "value" << std::setw(12) << "|grad|"
       << std::setw(13) << "stationarity" << std::setw(19) << "phase" << std::setw(7) << "iters"
       << std::setw(7) << "evals" << "branch\n";
    for (const StartTrace& t : result.traces) {
        os << std::setw(6) << t.index << std::setw(16) << std::setprecision(10) << t.value
           << std::setw(12) << std::setprecision(3) << t.grad_norm << std::setw(13) << t.stationarity
           << std::setw(19) << to_string(t.phase) << std::setw(7) << (t.bfgs_iterations + t.gs_iterations)
           << std::setw(7) << t.evaluations << (t.branch ? to_string(*t.branch) : "-") << "\n";
    }
    os << "best: start " << result.best_start << ", value " << std::setprecision(10) << result.best_value
       << "\n";
    return os.str();
}

}  // namespace shinf
