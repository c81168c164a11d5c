#include "doctest.h"
#include "fixtures.hpp"

using namespace shinf;

TEST_CASE("delays are sorted with their matrices") {
    DelayVector d({2.0, 0.5, 2.0, 1.0});
    CHECK(d.values() == std::vector<double>{0.5, 1.0, 2.0, 2.0});
    CHECK(d.original_index() == std::vector<std::size_t>{1, 3, 0, 2});
    CHECK_THROWS_AS(DelayVector({1.0, 0.0}), std::invalid_argument);

    Matrix I = Matrix::Identity(1, 1);
    DdaeSystem s(I, {-I, 2 * I, 3 * I}, I, I, {3.0, 1.0});
    CHECK(s.tau(0) == 1.0);
    CHECK(s.A(1)(0, 0) == 3.0);
    CHECK(s.A(2)(0, 0) == 2.0);
}

TEST_CASE("dimension checks") {
    Matrix I = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(DdaeSystem(I, {I}, Matrix::Zero(3, 1), Matrix::Zero(1, 2), {}), DimensionError);
    CHECK_THROWS_AS(DdaeSystem(I, {I, I}, Matrix::Zero(2, 1), Matrix::Zero(1, 2), {}), DimensionError);
    CHECK_THROWS_AS(DdaeSystem(I, {Matrix::Zero(3, 3)}, Matrix::Zero(2, 1), Matrix::Zero(1, 2), {}),
                    DimensionError);
}

TEST_CASE("nullspaces") {
    SUBCASE("nonsingular E") {
        Matrix I = Matrix::Identity(2, 2);
        const auto b = compute_nullspaces(DdaeSystem(I, {-I}, Matrix::Ones(2, 1), Matrix::Ones(1, 2), {}));
        CHECK(b.v == 0);
        CHECK(b.U.cols() == 0);
        CHECK(check_causality(DdaeSystem(I, {-I}, Matrix::Ones(2, 1), Matrix::Ones(1, 2), {}), b));
    }
    SUBCASE("diag(1, 0)") {
        const DdaeSystem s = fx::neutral1();
        const auto b = compute_nullspaces(s);
        REQUIRE(b.v == 1);
        CHECK(std::abs(std::abs(b.U(1, 0)) - 1.0) < 1e-15);
        CHECK(std::abs(std::abs(b.V(1, 0)) - 1.0) < 1e-15);
        CHECK((b.U.transpose() * s.E()).norm() <= 1e-12);
        CHECK((s.E() * b.V).norm() <= 1e-12);
        // U^T A0 V = -1
        CHECK((b.U.transpose() * s.A(0) * b.V)(0, 0) * b.U(1, 0) * b.V(1, 0) == doctest::Approx(-1.0));
        CHECK(check_causality(s, b));
        CHECK(effective_delays(s, b) == std::vector<std::size_t>{0, 1});
    }
    SUBCASE("random rank-deficient E") {
        std::mt19937_64 rng(3);
        const Matrix L = fx::random_matrix(rng, 5, 3), R = fx::random_matrix(rng, 3, 5);
        const Matrix E = L * R;
        const Matrix I = Matrix::Identity(5, 5);
        const auto b = compute_nullspaces(DdaeSystem(E, {I}, Matrix::Ones(5, 1), Matrix::Ones(1, 5), {}));
        CHECK(b.v == 2);
        CHECK((b.U.transpose() * E).norm() <= 1e-12 * E.norm());
        CHECK((E * b.V).norm() <= 1e-12 * E.norm());
        CHECK((b.U.transpose() * b.U - Matrix::Identity(2, 2)).norm() < 1e-13);
    }
}

TEST_CASE("zeroed algebraic row violates causality") {
    DdaeSystem s = fx::neutral1();
    std::vector<Matrix> A = s.A();
    A[0].row(1).setZero();
    DdaeSystem bad(s.E(), A, s.B(), s.C(), s.delays().values());
    CHECK_FALSE(check_causality(bad, compute_nullspaces(bad)));
}

TEST_CASE("affine parameter map") {
    const AffineDdae t = interconnect(fx::bench_plant(0.5), ControllerStructure::static_gain(1, 2));
    const Vector p1 = fx::gain(-3.5878, 1.5017), p2 = fx::gain(0.25, -2.0);
    const DdaeSystem a = substitute_parameters(t, p1), b = substitute_parameters(t, p2);
    for (std::size_t i = 0; i < a.A().size(); ++i) {
        Matrix lin = Matrix::Zero(a.n(), a.n());
        for (std::size_t k = 0; k < 2; ++k) lin += (p1(k) - p2(k)) * t.dA[k][i];
        CHECK((a.A(i) - b.A(i) - lin).norm() < 1e-14);
    }
    const DdaeSystem z = substitute_parameters(t, Vector::Zero(2));
    for (std::size_t i = 0; i < z.A().size(); ++i) CHECK(z.A(i) == t.base.A(i));
    CHECK_THROWS_AS(substitute_parameters(t, Vector::Zero(3)), DimensionError);
}
