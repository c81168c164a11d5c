#include "doctest.h"
#include "fixtures.hpp"
#include "shinf/synthesis.hpp"

using namespace shinf;

TEST_CASE("min-norm point of a convex hull") {
    Matrix G(2, 2);
    G << 1, 0, 0, 1;
    Vector w;
    const Vector x = min_norm_convex(G, &w);
    CHECK(x(0) == doctest::Approx(0.5));
    CHECK(x(1) == doctest::Approx(0.5));
    CHECK(w.sum() == doctest::Approx(1.0));

    Matrix H(2, 3);
    H << 1, -1, 0, 1, 1, -1;  // origin inside
    CHECK(min_norm_convex(H).norm() < 1e-12);

    Matrix P(2, 3);
    P << 2, 3, 2, 1, 5, -1;  // closest point (2, 0) on the first-third edge
    const Vector y = min_norm_convex(P);
    CHECK(y(0) == doctest::Approx(2.0));
    CHECK(std::abs(y(1)) < 1e-12);

    std::mt19937_64 rng(4);
    const Matrix R = fx::random_matrix(rng, 3, 7) + Matrix::Constant(3, 7, 0.5);
    Vector wr;
    const Vector z = min_norm_convex(R, &wr);
    CHECK((wr.array() >= 0.0).all());
    CHECK((R * wr - z).norm() < 1e-12);
    // optimality: no hull vertex improves on z
    for (Eigen::Index k = 0; k < R.cols(); ++k) CHECK(z.dot(R.col(k)) >= z.squaredNorm() - 1e-10);
}

namespace {

SynthesisProblem quadratic_problem() {
    SynthesisProblem pr;
    Matrix Q(3, 3);
    Q << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
    Vector c(3);
    c << 1, -2, 0.5;
    pr.test_objective = [Q, c](const Vector& p) {
        ObjectiveValue f;
        f.value = 0.5 * (p - c).dot(Q * (p - c));
        f.grad = Q * (p - c);
        f.smooth = true;
        return f;
    };
    pr.initial = {Vector::Zero(3)};
    pr.options.starts = 3;
    pr.options.grad_tol = 1e-12;
    return pr;
}

}  // namespace

TEST_CASE("quadratic through the test hook") {
    const SynthesisProblem pr = quadratic_problem();
    const SynthesisResult r = optimize(pr);
    Vector c(3);
    c << 1, -2, 0.5;
    CHECK((r.best_p - c).norm() < 1e-8);
    REQUIRE(r.traces.size() == 3);
    for (const auto& t : r.traces) {
        CHECK((t.p - c).norm() < 1e-8);
        for (std::size_t i = 1; i < t.values.size(); ++i) CHECK(t.values[i] < t.values[i - 1]);
    }
    CHECK(r.traces[0].draws == 0);
    CHECK(r.traces[1].draws == 1);

    // deterministic and independent of the worker count
    SynthesisProblem p1 = pr, p3 = pr;
    p1.options.threads = 1;
    p3.options.threads = 3;
    const SynthesisResult a = optimize(p1), b = optimize(p3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.traces[i].p0 == b.traces[i].p0);
        CHECK(a.traces[i].values == b.traces[i].values);
    }

    const std::string table = multistart_report(r);
    CHECK(std::count(table.begin(), table.end(), '\n') == 5);
    CHECK_THROWS_AS(multistart_report(SynthesisResult{}), std::invalid_argument);
}

TEST_CASE("nonsmooth objective reaches gradient sampling") {
    SynthesisProblem pr;
    pr.test_objective = [](const Vector& p) {
        // max of two planes plus a quadratic: minimum on the kink at (0, 0)
        ObjectiveValue f;
        const double a = p(0) + 0.5 * p(1), b = -p(0) + 0.5 * p(1);
        Vector g(2);
        if (a >= b) g << 1.0, 0.5; else g << -1.0, 0.5;
        f.value = std::max(a, b) + p.squaredNorm();
        f.grad = g + 2.0 * p;
        f.smooth = a != b;
        return f;
    };
    Vector x0(2);
    x0 << 1.3, 0.7;
    pr.initial = {x0};
    pr.options.starts = 1;
    const SynthesisResult r = optimize(pr);
    CHECK(r.traces[0].phase == Phase::GradientSampling);
    CHECK(r.best_p(0) == doctest::Approx(0.0).epsilon(1e-3));
    CHECK(r.best_p(1) == doctest::Approx(-0.25).epsilon(1e-3));
    CHECK(r.traces[0].stationarity < 1e-4);
}

TEST_CASE("closed-loop objective") {
    SynthesisProblem pr;
    pr.plant = fx::bench_plant(0.5);
    pr.structure = ControllerStructure::static_gain(1, 2);
    const ObjectiveValue f = objective(pr, fx::gain(-3.5878, 1.5017));
    CHECK(f.finite());
    CHECK(std::abs(f.value - 0.4101) <= 1e-3);
    CHECK(f.grad.size() == 2);
    CHECK(f.cert.has_value());
    const ObjectiveValue z = objective(pr, fx::gain(0.0, 0.0));
    CHECK(std::isinf(z.value));
    CHECK(z.grad.size() == 0);
}

TEST_CASE("short closed-loop run from a given start") {
    SynthesisProblem pr;
    pr.plant = fx::bench_plant(0.5);
    pr.structure = ControllerStructure::static_gain(1, 2);
    pr.initial = {fx::gain(-3.0, 1.2)};
    pr.options.starts = 1;
    pr.options.max_iter = 20;
    pr.options.max_gs_iter = 3;
    const SynthesisResult r = optimize(pr);
    REQUIRE(r.cert.has_value());
    CHECK(r.best_value <= r.traces[0].values.front());
    CHECK(std::abs(r.best_value - r.traces[0].value) <= 1e-8);
    CHECK(r.best_value < 0.43);
    for (std::size_t i = 1; i < r.traces[0].values.size(); ++i) {
        CHECK(r.traces[0].values[i] < r.traces[0].values[i - 1]);
    }
}

TEST_CASE("no stabilizing start") {
    SynthesisProblem pr;
    pr.test_objective = [](const Vector&) { return ObjectiveValue{}; };
    pr.initial = {Vector::Zero(2)};
    pr.options.starts = 2;
    pr.options.max_draws = 5;
    CHECK_THROWS_AS(optimize(pr), NoStabilizingStart);
}
