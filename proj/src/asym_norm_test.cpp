#include "doctest.h"
#include "fixtures.hpp"
#include "shinf/asym_norm.hpp"

using namespace shinf;

TEST_CASE("neutral fixture: 16/7 at theta = (0, pi)") {
    for (double t1 : {1.0, 0.99}) {
        const DdaeSystem s = fx::neutral1(t1, 2.0);
        const NullspaceBases b = compute_nullspaces(s);
        const AsymNormResult r = strong_norm_Ta(s, b);
        CHECK(r.value == doctest::Approx(16.0 / 7.0).epsilon(1e-12));
        CHECK(r.converged);
        CHECK(std::abs(r.theta_hat.theta[0]) < 1e-8);
        CHECK(std::abs(r.theta_hat.theta[1] - kPi) < 1e-8);
        CHECK(r.effective.size() == 2);
    }
}

TEST_CASE("grid maximum off the grid is corrected") {
    // a single delay with a complex-conjugate structure so the peak angle is not a grid point
    Matrix E = Matrix::Zero(3, 3), A0(3, 3), A1 = Matrix::Zero(3, 3), B(3, 1), C(1, 3);
    E(0, 0) = 1.0;
    A0 << -1, 0, 0, 0, -1, 0.3, 0, -0.3, -1;
    A1.bottomRightCorner(2, 2) << 0.2, 0.35, -0.1, 0.25;
    B << 0, 1, 0.5;
    C << 0, 1, -1;
    const DdaeSystem s(E, {A0, A1}, B, C, {0.7});
    const NullspaceBases b = compute_nullspaces(s);
    const GridSweepResult g = grid_sweep(s, b, 40, 2000000);
    const AsymNormResult r = strong_norm_Ta(s, b);
    CHECK(r.converged);
    CHECK(r.value >= g.value);
    // brute force on a fine grid never beats the corrected value
    double fine = 0.0;
    for (int k = 0; k < 20000; ++k) {
        ThetaPoint p;
        p.theta = {kTwoPi * k / 20000.0};
        fine = std::max(fine, eval_Ta_theta(s, b, p).sigma1);
    }
    CHECK(r.value >= fine - 1e-12);
    CHECK(r.value - fine < 1e-6);
    CHECK(r.stationarity.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("trivial cases") {
    std::mt19937_64 rng(1);
    const DdaeSystem ode = fx::random_ode(rng, 3, 1, 1);
    const NullspaceBases b = compute_nullspaces(ode);
    CHECK(strong_norm_Ta(ode, b).value == 0.0);

    // delays that do not touch the algebraic block leave T_a constant
    Matrix E(2, 2), A0(2, 2), A1 = Matrix::Zero(2, 2), B(2, 1), C(1, 2);
    E << 1, 0, 0, 0;
    A0 << -1, 1, 1, -2;
    A1(0, 0) = 0.4;
    B << 1, 1;
    C << 1, 1;
    const DdaeSystem s(E, {A0, A1}, B, C, {1.0});
    const NullspaceBases bs = compute_nullspaces(s);
    CHECK(effective_delays(s, bs).empty());
    CHECK(strong_norm_Ta(s, bs).value == doctest::Approx(0.5));
}

TEST_CASE("singular asymptotic matrix is a causality error") {
    Matrix E(2, 2), A0(2, 2), A1 = Matrix::Zero(2, 2), B(2, 1), C(1, 2);
    E << 1, 0, 0, 0;
    A0 << -1, 0, 0, -1;
    A1(1, 1) = 1.0;  // -U^T A0 V - U^T A1 V e^{-j theta} = 1 - e^{-j theta} vanishes at 0
    B << 0, 1;
    C << 0, 1;
    const DdaeSystem s(E, {A0, A1}, B, C, {1.0});
    CHECK_THROWS_AS(strong_norm_Ta(s, compute_nullspaces(s)), CausalityViolation);
}
