#pragma once

#include <cstddef>
#include <vector>

#include "shinf/types.hpp"

namespace shinf {

/// Positive delays, kept sorted ascending. `original_index()[i]` is the
/// position the i-th sorted delay had when the vector was built; equal
/// values stay separate entries in their original relative order.
class DelayVector {
public:
    DelayVector() = default;
    explicit DelayVector(std::vector<double> taus);

    std::size_t size() const { return taus_.size(); }
    bool empty() const { return taus_.empty(); }
    double operator[](std::size_t i) const { return taus_[i]; }
    const std::vector<double>& values() const { return taus_; }
    const std::vector<std::size_t>& original_index() const { return index_; }
    double max() const { return taus_.empty() ? 0.0 : taus_.back(); }

private:
    std::vector<double> taus_;
    std::vector<std::size_t> index_;
};

/// E x'(t) = A0 x(t) + sum_i A_i x(t - tau_i) + B w(t),  z(t) = C x(t).
class DdaeSystem {
public:
    DdaeSystem() = default;

    /// `A` holds A0..Am with A[i] (i >= 1) paired with `taus[i-1]`. The
    /// pairs are reordered so that delays are ascending.
    DdaeSystem(Matrix E, std::vector<Matrix> A, Matrix B, Matrix C, std::vector<double> taus);

    Eigen::Index n() const { return E_.rows(); }
    Eigen::Index inputs() const { return B_.cols(); }
    Eigen::Index outputs() const { return C_.rows(); }
    std::size_t num_delays() const { return delays_.size(); }

    const Matrix& E() const { return E_; }
    const Matrix& A(std::size_t i) const { return A_[i]; }
    const std::vector<Matrix>& A() const { return A_; }
    const Matrix& B() const { return B_; }
    const Matrix& C() const { return C_; }
    const DelayVector& delays() const { return delays_; }
    double tau(std::size_t i) const { return delays_[i]; }

    /// Copy with new delay values (same pairing, same order of A).
    DdaeSystem with_delays(const std::vector<double>& taus) const;

private:
    Matrix E_;
    std::vector<Matrix> A_;
    Matrix B_;
    Matrix C_;
    DelayVector delays_;
};

/// Orthonormal bases of the left (U) and right (V) nullspaces of E.
struct NullspaceBases {
    Matrix U;
    Matrix V;
    Eigen::Index v = 0;
};

NullspaceBases compute_nullspaces(const DdaeSystem& sys);

/// Smallest singular value of U^T A0 V (infinity when v = 0).
double causality_margin(const DdaeSystem& sys, const NullspaceBases& bases);

/// Assumption check: U^T A0 V nonsingular.
bool check_causality(const DdaeSystem& sys, const NullspaceBases& bases, double tol = 1e-10);

/// Indices i (0-based into the delays) whose block U^T A_{i+1} V is nonzero.
std::vector<std::size_t> effective_delays(const DdaeSystem& sys, const NullspaceBases& bases,
                                          double tol = 1e-14);

/// A DDAE whose delay matrices depend affinely on a parameter vector:
/// A_i(p) = A_i(0) + sum_k p_k dA[k][i]. E, B, C and the delays are constant.
struct AffineDdae {
    DdaeSystem base;
    std::vector<std::vector<Matrix>> dA;

    std::size_t num_params() const { return dA.size(); }
};

DdaeSystem substitute_parameters(const AffineDdae& tmpl, const Vector& p);

}  // namespace shinf
