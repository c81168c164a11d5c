#include "shinf/ddae.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace shinf {

DelayVector::DelayVector(std::vector<double> taus) {
    for (double t : taus) {
        if (!(t > 0.0)) {
            throw std::invalid_argument("delays must be positive, got " + std::to_string(t));
        }
    }
    index_.resize(taus.size());
    std::iota(index_.begin(), index_.end(), std::size_t{0});
    std::stable_sort(index_.begin(), index_.end(),
                     [&](std::size_t a, std::size_t b) { return taus[a] < taus[b]; });
    taus_.reserve(taus.size());
    for (std::size_t i : index_) taus_.push_back(taus[i]);
}

DdaeSystem::DdaeSystem(Matrix E, std::vector<Matrix> A, Matrix B, Matrix C,
                       std::vector<double> taus) {
    const Eigen::Index n = E.rows();
    if (E.cols() != n) throw DimensionError("E must be square");
    if (A.size() != taus.size() + 1) {
        throw DimensionError("expected " + std::to_string(taus.size() + 1) + " A matrices, got " +
                             std::to_string(A.size()));
    }
    for (std::size_t i = 0; i < A.size(); ++i) {
        if (A[i].rows() != n || A[i].cols() != n) {
            throw DimensionError("A" + std::to_string(i) + " must be " + std::to_string(n) + "x" +
                                 std::to_string(n));
        }
    }
    if (B.rows() != n) throw DimensionError("B must have n rows");
    if (C.cols() != n) throw DimensionError("C must have n columns");

    delays_ = DelayVector(std::move(taus));
    A_.reserve(A.size());
    A_.push_back(std::move(A[0]));
    for (std::size_t i : delays_.original_index()) A_.push_back(std::move(A[i + 1]));
    E_ = std::move(E);
    B_ = std::move(B);
    C_ = std::move(C);
}

DdaeSystem DdaeSystem::with_delays(const std::vector<double>& taus) const {
    if (taus.size() != delays_.size()) throw DimensionError("delay count mismatch");
    return DdaeSystem(E_, A_, B_, C_, taus);
}

NullspaceBases compute_nullspaces(const DdaeSystem& sys) {
    const Eigen::Index n = sys.n();
    NullspaceBases out;
    if (n == 0) return out;
    Eigen::JacobiSVD<Matrix> svd(sys.E(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double thresh = static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
                          (s.size() > 0 ? s(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > thresh) ++rank;
    }
    out.v = n - rank;
    out.U = svd.matrixU().rightCols(out.v);
    out.V = svd.matrixV().rightCols(out.v);
    return out;
}

double causality_margin(const DdaeSystem& sys, const NullspaceBases& bases) {
    if (bases.v == 0) return std::numeric_limits<double>::infinity();
    const Matrix block = bases.U.transpose() * sys.A(0) * bases.V;
    Eigen::JacobiSVD<Matrix> svd(block);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

bool check_causality(const DdaeSystem& sys, const NullspaceBases& bases, double tol) {
    return causality_margin(sys, bases) > tol;
}

std::vector<std::size_t> effective_delays(const DdaeSystem& sys, const NullspaceBases& bases,
                                          double tol) {
    std::vector<std::size_t> out;
    if (bases.v == 0) return out;
    const double scale = std::max(1.0, sys.A(0).norm());
    for (std::size_t i = 0; i < sys.num_delays(); ++i) {
        const Matrix block = bases.U.transpose() * sys.A(i + 1) * bases.V;
        if (block.norm() > tol * scale) out.push_back(i);
    }
    return out;
}

DdaeSystem substitute_parameters(const AffineDdae& tmpl, const Vector& p) {
    if (static_cast<std::size_t>(p.size()) != tmpl.num_params()) {
        throw DimensionError("parameter vector has length " + std::to_string(p.size()) +
                             ", template expects " + std::to_string(tmpl.num_params()));
    }
    std::vector<Matrix> A = tmpl.base.A();
    for (std::size_t k = 0; k < tmpl.num_params(); ++k) {
        if (p(k) == 0.0) continue;
        for (std::size_t i = 0; i < A.size(); ++i) A[i] += p(k) * tmpl.dA[k][i];
    }
    // base delays are already sorted, so the pairing is preserved.
    return DdaeSystem(tmpl.base.E(), std::move(A), tmpl.base.B(), tmpl.base.C(),
                      tmpl.base.delays().values());
}

}  // namespace shinf
