#include "doctest.h"
#include "fixtures.hpp"
#include "shinf/transfer.hpp"

using namespace shinf;

TEST_CASE("neutral fixture matches its closed form") {
    const DdaeSystem s = fx::neutral1(1.0, 2.0);
    for (double w : {0.0, 0.3, 1.0, 1.772, 10.0, 250.0}) {
        const Complex l(0.0, w);
        const Complex ref = (l + 2.0) / (l * (1.0 - std::exp(-l) / 16.0 + std::exp(-2.0 * l) / 2.0) + 1.0);
        CHECK(std::abs(eval_T(s, l).matrix(0, 0) - ref) < 1e-13);
    }
    CHECK(eval_T(s, 0.0).sigma1 == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("asymptotic transfer function") {
    const DdaeSystem s = fx::neutral1(1.0, 2.0);
    const NullspaceBases b = compute_nullspaces(s);
    ThetaPoint p;
    p.theta = {0.0, kPi};
    CHECK(eval_Ta_theta(s, b, p).sigma1 == doctest::Approx(16.0 / 7.0).epsilon(1e-14));
    p.theta = {kPi, 0.0};
    CHECK(eval_Ta_theta(s, b, p).sigma1 == doctest::Approx(1.0 / (1.0 + 1.0 / 16 + 0.5)).epsilon(1e-14));
    // j omega maps to theta = omega tau mod 2 pi
    const double w = 37.3;
    p.theta = {wrap_angle(w * 1.0), wrap_angle(w * 2.0)};
    CHECK(std::abs(eval_Ta(s, b, Complex(0.0, w)).sigma1 - eval_Ta_theta(s, b, p).sigma1) < 1e-12);
    // and T approaches T_a at high frequency
    CHECK(std::abs(eval_T(s, Complex(0.0, 1e7)).sigma1 - eval_Ta(s, b, Complex(0.0, 1e7)).sigma1) < 1e-5);
}

TEST_CASE("ODEs have a vanishing asymptotic part") {
    const Matrix I = Matrix::Identity(1, 1);
    const DdaeSystem lag(I, {-I}, I, I, {});
    CHECK(eval_T(lag, 0.0).sigma1 == doctest::Approx(1.0));
    const NullspaceBases b = compute_nullspaces(lag);
    CHECK(eval_Ta(lag, b, Complex(0.0, 3.0)).sigma1 == 0.0);
}

TEST_CASE("pole on the axis is reported") {
    const Matrix I = Matrix::Identity(1, 1);
    const DdaeSystem integrator(I, {Matrix::Zero(1, 1)}, I, I, {});
    CHECK_THROWS_AS(eval_T(integrator, 0.0), TransmissionPole);
}

TEST_CASE("sweep and helpers") {
    const auto g = logspace(1e-2, 1e2, 5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == doctest::Approx(1e-2));
    CHECK(g[2] == doctest::Approx(1.0));
    CHECK(g.back() == doctest::Approx(1e2));
    CHECK(wrap_angle(-0.5) == doctest::Approx(kTwoPi - 0.5));
    CHECK(wrap_angle(7.0) == doctest::Approx(7.0 - kTwoPi));

    std::mt19937_64 rng(5);
    const DdaeSystem s = fx::random_ode(rng, 3, 2, 2);
    const auto rows = sweep(s, {0.1, 1.0}, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].sigma.size() == 2);
    CHECK(rows[0].sigma(0) >= rows[0].sigma(1));
    CHECK(rows[1].sigma(0) == doctest::Approx(eval_T(s, Complex(0.0, 1.0)).sigma1));
}
