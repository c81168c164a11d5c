#include "doctest.h"
#include "fixtures.hpp"
#include "shinf/levelset.hpp"
#include "shinf/oracle.hpp"

using namespace shinf;

TEST_CASE("crossings of a second-order lag") {
    Matrix A(2, 2), B(2, 1), C(1, 2);
    A << 0, 1, -1, -0.2;
    B << 0, 1;
    C << 1, 0;
    const DdaeSystem s(Matrix::Identity(2, 2), {A}, B, C, {});
    const DiscretizedSystem d = discretize(s, 2);
    const double xi = 2.0;
    // (1 - w^2)^2 + 0.04 w^2 = 1 / xi^2, a quadratic in w^2
    const double b = -1.96, c = 1.0 - 1.0 / (xi * xi);
    const double r1 = std::sqrt((-b - std::sqrt(b * b - 4 * c)) / 2), r2 = std::sqrt((-b + std::sqrt(b * b - 4 * c)) / 2);
    const auto w = crossing_frequencies(d, xi);
    REQUIRE(w.size() == 2);
    CHECK(w[0] == doctest::Approx(r1).epsilon(1e-10));
    CHECK(w[1] == doctest::Approx(r2).epsilon(1e-10));
    CHECK(crossing_frequencies(d, 6.0).empty());
    CHECK_THROWS_AS(crossing_frequencies(d, 0.0), std::invalid_argument);
}

TEST_CASE("neutral fixture: frequency branch") {
    // plain peaks from the dense reference sweep (tests/oracles/derive.py)
    const std::pair<double, double> cases[] = {{1.0, 2.385464374423}, {0.99, 2.389446156755}};
    for (auto [t1, ref] : cases) {
        const NormCertificate c = strong_hinf(fx::neutral1(t1, 2.0));
        CHECK(c.kind == Branch::Frequency);
        CHECK(c.value == doctest::Approx(ref).epsilon(1e-10));
        CHECK(c.omega_hat == doctest::Approx(1.772).epsilon(1e-3));
        CHECK(c.ta_norm == doctest::Approx(16.0 / 7.0).epsilon(1e-12));
        CHECK(c.corrected);
        CHECK(c.simple);
        CHECK(c.N == 20);
        CHECK(std::is_sorted(c.history.begin(), c.history.end()));
        CHECK(c.history.front() == doctest::Approx(16.0 / 7.0));
        // certificate vectors belong to sigma_1 at omega_hat
        const DdaeSystem s = fx::neutral1(t1, 2.0);
        const CMatrix M = characteristic_matrix(s, Complex(0.0, c.omega_hat));
        const Matrix& B = s.B();
        CHECK((M * c.u - B * B.transpose() * c.v / c.value).norm() < 1e-9);
    }
}

TEST_CASE("asymptotic branch wins ties") {
    // purely algebraic T(s) = 1 / (1 + e^{-s}/2): plain sup and T_a norm both 2
    Matrix E(2, 2), A0(2, 2), A1 = Matrix::Zero(2, 2), B(2, 1), C(1, 2);
    E << 1, 0, 0, 0;
    A0 << -1, 0, 0, -1;
    A1(1, 1) = -0.5;
    B << 0, 1;
    C << 0, 1;
    const NormCertificate c = strong_hinf(DdaeSystem(E, {A0, A1}, B, C, {1.0}));
    CHECK(c.kind == Branch::Asymptotic);
    CHECK(c.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(c.theta_hat.theta[0] == doctest::Approx(kPi).epsilon(1e-8));

    // small dynamic coupling below the plateau keeps the asymptotic branch
    Matrix A0b(2, 2), Cb(1, 2);
    A0b << -5, 0, 0.1, -1;
    Cb << 0.2, 1;
    Matrix Bb(2, 1);
    Bb << 0.1, 1;
    const NormCertificate c2 = strong_hinf(DdaeSystem(E, {A0b, A1}, Bb, Cb, {1.0}));
    DenseSweepSpec spec;
    spec.omega_max = 1e4;
    const double plain = dense_hinf(DdaeSystem(E, {A0b, A1}, Bb, Cb, {1.0}), spec).value;
    CHECK(c2.value >= plain - 1e-9);
    CHECK(c2.value == doctest::Approx(std::max(plain, c2.ta_norm)).epsilon(1e-6));
}

TEST_CASE("delay-free systems agree with bisection") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 5; ++k) {
        const DdaeSystem s = fx::random_ode(rng, 2 + k % 3, 1 + k % 2, 2);
        const NormCertificate c = strong_hinf(s);
        CHECK(c.ta_norm == 0.0);
        CHECK(c.kind == Branch::Frequency);
        CHECK(std::abs(c.value - bb_bisection(s.A(0), s.B(), s.C())) <= 1e-8 * c.value);
    }
}

TEST_CASE("value does not depend on N") {
    const DdaeSystem s = fx::bench_loop(0.5, fx::gain(-3.5878, 1.5017));
    NormOptions a, b;
    b.N = 40;
    const double va = strong_hinf(s, a).value, vb = strong_hinf(s, b).value;
    CHECK(std::abs(va - vb) <= 1e-6 * va);
    NormOptions au;
    au.auto_N = true;
    const NormCertificate c = strong_hinf(s, au);
    CHECK(c.N >= 40);
    CHECK(std::abs(c.value - va) <= 1e-6 * va);
}

TEST_CASE("assumption failures") {
    CHECK_THROWS_AS(strong_hinf(fx::bench_loop(1.0, fx::gain(0.1942, -0.4964))), StrongStabilityViolation);
    DdaeSystem s = fx::neutral1();
    std::vector<Matrix> A = s.A();
    A[0].row(1).setZero();
    CHECK_THROWS_AS(strong_hinf(DdaeSystem(s.E(), A, s.B(), s.C(), s.delays().values())), CausalityViolation);
}

TEST_CASE("prediction iterates upward") {
    const DdaeSystem s = fx::bench_loop(0.1, fx::gain(-17.8065, 9.5915));
    const DiscretizedSystem d = discretize(s, 20);
    const Prediction p = predict(s, d, 0.0, 1e-6);
    CHECK_FALSE(p.asymptotic);
    CHECK(std::is_sorted(p.history.begin(), p.history.end()));
    CHECK(p.xi_tilde == doctest::Approx(0.4004926012).epsilon(1e-5));
    CHECK_FALSE(p.candidates.empty());
}
