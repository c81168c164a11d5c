#include "shinf/transfer.hpp"

#include <cmath>

namespace shinf {

namespace {

constexpr double kMinRcond = 1e-14;

CMatrix asymptotic_matrix_exp(const DdaeSystem& sys, const NullspaceBases& bases,
                              const std::vector<Complex>& phases) {
    const Matrix& U = bases.U;
    const Matrix& V = bases.V;
    CMatrix M = (-(U.transpose() * sys.A(0) * V)).cast<Complex>();
    for (std::size_t i = 0; i < sys.num_delays(); ++i) {
        M -= (U.transpose() * sys.A(i + 1) * V).cast<Complex>() * phases[i];
    }
    return M;
}

FrequencyResponse solve_response(Complex lambda, const CMatrix& M, const CMatrix& left,
                                 const CMatrix& right, const char* what) {
    FrequencyResponse out;
    out.lambda = lambda;
    Eigen::PartialPivLU<CMatrix> lu(M);
    if (M.size() > 0 && !(lu.rcond() > kMinRcond)) {
        throw TransmissionPole(std::string(what) + " is singular at lambda = (" +
                                   std::to_string(lambda.real()) + ", " +
                                   std::to_string(lambda.imag()) + ")",
                               lambda);
    }
    out.matrix = left * lu.solve(right);
    out.sigma1 = sigma_max(out.matrix);
    return out;
}

}  // namespace

double wrap_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

double sigma_max(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1 || m.cols() == 1) return m.norm();
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

Vector singular_values(const CMatrix& m) {
    if (m.size() == 0) return Vector();
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues();
}

CMatrix characteristic_matrix(const DdaeSystem& sys, Complex lambda) {
    CMatrix M = lambda * sys.E().cast<Complex>() - sys.A(0).cast<Complex>();
    for (std::size_t i = 0; i < sys.num_delays(); ++i) {
        M -= sys.A(i + 1).cast<Complex>() * std::exp(-lambda * sys.tau(i));
    }
    return M;
}

CMatrix asymptotic_matrix(const DdaeSystem& sys, const NullspaceBases& bases,
                          const std::vector<double>& theta) {
    std::vector<Complex> phases(sys.num_delays());
    for (std::size_t i = 0; i < phases.size(); ++i) phases[i] = std::polar(1.0, -theta[i]);
    return asymptotic_matrix_exp(sys, bases, phases);
}

FrequencyResponse eval_T(const DdaeSystem& sys, Complex lambda) {
    return solve_response(lambda, characteristic_matrix(sys, lambda), sys.C().cast<Complex>(),
                          sys.B().cast<Complex>(), "characteristic matrix");
}

FrequencyResponse eval_Ta_theta(const DdaeSystem& sys, const NullspaceBases& bases,
                                const ThetaPoint& point) {
    if (point.theta.size() != sys.num_delays()) {
        throw DimensionError("theta has " + std::to_string(point.theta.size()) +
                             " entries, system has " + std::to_string(sys.num_delays()) +
                             " delays");
    }
    if (bases.v == 0) {
        FrequencyResponse out;
        out.matrix = CMatrix::Zero(sys.outputs(), sys.inputs());
        return out;
    }
    return solve_response(Complex(0.0, 0.0), asymptotic_matrix(sys, bases, point.theta),
                          (sys.C() * bases.V).cast<Complex>(),
                          (bases.U.transpose() * sys.B()).cast<Complex>(),
                          "asymptotic matrix");
}

FrequencyResponse eval_Ta(const DdaeSystem& sys, const NullspaceBases& bases, Complex lambda) {
    if (lambda.real() == 0.0) {
        ThetaPoint p;
        for (std::size_t i = 0; i < sys.num_delays(); ++i) {
            p.theta.push_back(wrap_angle(lambda.imag() * sys.tau(i)));
        }
        FrequencyResponse out = eval_Ta_theta(sys, bases, p);
        out.lambda = lambda;
        return out;
    }
    if (bases.v == 0) {
        FrequencyResponse out;
        out.lambda = lambda;
        out.matrix = CMatrix::Zero(sys.outputs(), sys.inputs());
        return out;
    }
    std::vector<Complex> phases(sys.num_delays());
    for (std::size_t i = 0; i < phases.size(); ++i) phases[i] = std::exp(-lambda * sys.tau(i));
    return solve_response(lambda, asymptotic_matrix_exp(sys, bases, phases),
                          (sys.C() * bases.V).cast<Complex>(),
                          (bases.U.transpose() * sys.B()).cast<Complex>(), "asymptotic matrix");
}

std::vector<SweepRow> sweep(const DdaeSystem& sys, const std::vector<double>& omegas,
                            int num_sigma) {
    std::vector<SweepRow> rows;
    rows.reserve(omegas.size());
    for (double w : omegas) {
        const auto r = eval_T(sys, Complex(0.0, w));
        Vector s = singular_values(r.matrix);
        const Eigen::Index keep = std::min<Eigen::Index>(s.size(), std::max(1, num_sigma));
        rows.push_back({w, s.head(keep)});
    }
    return rows;
}

std::vector<double> logspace(double lo, double hi, int count) {
    std::vector<double> out;
    if (count <= 0) return out;
    if (count == 1) return {lo};
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out.push_back(std::pow(10.0, a + (b - a) * i / (count - 1)));
    }
    return out;
}

}  // namespace shinf
