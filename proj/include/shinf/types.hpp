#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace shinf {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Inconsistent matrix sizes or parameter vector lengths.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// U^T A0 V is singular: the DDAE is of advanced type.
class CausalityViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The zero solution is not strongly exponentially stable.
class StrongStabilityViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The resolvent is (numerically) singular at the requested point.
class TransmissionPole : public std::runtime_error {
public:
    TransmissionPole(const std::string& what, Complex at)
        : std::runtime_error(what), lambda(at) {}
    Complex lambda;
};

// Eigensolver breakdown, iteration caps and similar.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace shinf
