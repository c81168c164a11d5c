#pragma once

#include <random>

#include "shinf/interconnect.hpp"

namespace fx {

using namespace shinf;

// E = diag(1, 0); T(s) = (s + 2) / (s (1 - e^{-s t1}/16 + e^{-s t2}/2) + 1)
inline DdaeSystem neutral1(double t1 = 1.0, double t2 = 2.0) {
    Matrix E(2, 2), A0(2, 2), A1 = Matrix::Zero(2, 2), A2 = Matrix::Zero(2, 2), B(2, 1), C(1, 2);
    E << 1, 0, 0, 0;
    A0 << 0, 1, -1, -1;
    A1(1, 1) = 1.0 / 16;
    A2(1, 1) = -0.5;
    B << 0, 1;
    C << 2, 1;
    return DdaeSystem(E, {A0, A1, A2}, B, C, {t1, t2});
}

// plant of the static-gain benchmark, delay h on the state
inline PlantModel bench_plant(double h) {
    PlantModel p;
    p.nx = 2;
    p.nw = 1;
    p.nu = 1;
    p.nz = 2;
    p.ny = 2;
    Matrix A(2, 2), Ad(2, 2), Bw(2, 1), Bu(2, 1), Cz(2, 2), Dzu(2, 1);
    A << 2, 1, 0, -1;
    Ad << -1, 0, -1, 1;
    Bw << -0.5, 1;
    Bu << 3, 1;
    Cz << 1, -0.5, 0, 0;
    Dzu << 0, 1;
    p.A = {{0.0, A}, {h, Ad}};
    p.Bw = {{0.0, Bw}};
    p.Bu = {{0.0, Bu}};
    p.Cz = {{0.0, Cz}};
    p.Dzu = {{0.0, Dzu}};
    p.Cy = {{0.0, Matrix::Identity(2, 2)}};
    return p;
}

inline Vector gain(double k1, double k2) {
    Vector k(2);
    k << k1, k2;
    return k;
}

inline DdaeSystem bench_loop(double h, const Vector& k) {
    return interconnect(bench_plant(h), ControllerStructure::static_gain(1, 2), k);
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = g(rng);
    return m;
}

// Hurwitz A (shifted random matrix) with random B, C
inline DdaeSystem random_ode(std::mt19937_64& rng, Eigen::Index n, Eigen::Index nw, Eigen::Index nz) {
    Matrix A = random_matrix(rng, n, n);
    Eigen::EigenSolver<Matrix> es(A, false);
    A -= (es.eigenvalues().real().maxCoeff() + 0.2 + std::uniform_real_distribution<double>(0, 1)(rng)) *
         Matrix::Identity(n, n);
    return DdaeSystem(Matrix::Identity(n, n), {A}, random_matrix(rng, n, nw), random_matrix(rng, nz, n), {});
}

}  // namespace fx
