#include "doctest.h"
#include "fixtures.hpp"
#include "shinf/oracle.hpp"

using namespace shinf;

TEST_CASE("scalar lag") {
    const Matrix I = Matrix::Identity(1, 1);
    const DdaeSystem lag(I, {-I}, I, I, {});
    const DenseResult r = dense_hinf(lag);
    CHECK(r.value == doctest::Approx(1.0));
    CHECK(r.omega == 0.0);
    CHECK(bb_bisection(-I, I, I) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("neutral fixture references") {
    const DdaeSystem s = fx::neutral1(1.0, 2.0);
    CHECK(dense_hinf(s).value == doctest::Approx(2.385464374423).epsilon(1e-10));
    const DenseResult ta = dense_ta(s, compute_nullspaces(s));
    CHECK(ta.value == doctest::Approx(16.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("bisection against a dense sweep") {
    std::mt19937_64 rng(21);
    for (int k = 0; k < 4; ++k) {
        const DdaeSystem s = fx::random_ode(rng, 4, 2, 2);
        const double bb = bb_bisection(s.A(0), s.B(), s.C());
        const double dn = dense_hinf(s).value;
        CHECK(bb >= dn - 1e-9);
        CHECK(std::abs(bb - dn) <= 1e-6 * bb);
    }
}

TEST_CASE("unstable A is rejected") {
    Matrix A(2, 2);
    A << 0.1, 1, 0, -1;
    CHECK_THROWS_AS(bb_bisection(A, Matrix::Ones(2, 1), Matrix::Ones(1, 2)), StrongStabilityViolation);
}

TEST_CASE("no algebraic part") {
    std::mt19937_64 rng(1);
    const DdaeSystem s = fx::random_ode(rng, 3, 1, 1);
    CHECK(dense_ta(s, compute_nullspaces(s)).value == 0.0);
    DenseSweepSpec bad;
    bad.points = 1;
    CHECK_THROWS_AS(dense_hinf(s, bad), std::invalid_argument);
}
