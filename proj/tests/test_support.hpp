#pragma once
// Shared random-instance generators for the solver and potential-theory test
// suites. Everything is seeded explicitly; no test depends on global RNG state.

#include <capax/qp.hpp>
#include <capax/rng.hpp>

#include <cmath>
#include <vector>

namespace testsup {

using capax::Matrix;
using capax::QpProblem;
using capax::Rng;
using capax::Vector;

inline Matrix random_spd(Rng& rng, int n) {
    Matrix R(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R(i, j) = rng.normal() / std::sqrt(static_cast<double>(n));
    return R.transpose() * R + 0.3 * Matrix::Identity(n, n);
}

inline Vector random_vec(Rng& rng, int n, double lo, double hi) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
    return v;
}

inline QpProblem random_nonneg_qp(Rng& rng, int n) {
    QpProblem p;
    p.Q = random_spd(rng, n);
    p.b = random_vec(rng, n, -1.0, 1.0);
    p.constraint = capax::ConstraintKind::nonneg;
    return p;
}

inline QpProblem random_simplex_qp(Rng& rng, int n) {
    QpProblem p = random_nonneg_qp(rng, n);
    p.constraint = capax::ConstraintKind::simplex;
    return p;
}

// Feasibility by construction: c_vec = A x0 - slack for a nonnegative x0.
inline QpProblem random_linear_ineq_qp(Rng& rng, int n, int max_rows = 5) {
    QpProblem p;
    p.Q = random_spd(rng, n);
    p.b = random_vec(rng, n, -1.0, 1.0);
    p.constraint = capax::ConstraintKind::linear_ineq;
    int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_rows)));
    p.A_mat = Matrix(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) p.A_mat(i, j) = rng.normal();
    Vector x0 = random_vec(rng, n, 0.0, 1.0);
    p.c_vec = p.A_mat * x0 - random_vec(rng, m, 0.0, 0.5);
    return p;
}

struct LpInstance {
    Vector c;
    Matrix A;
    Vector b;
};

// Bounded (c > 0 on the nonnegative orthant) and feasible by construction.
inline LpInstance random_lp(Rng& rng, int n, int max_rows = 5) {
    LpInstance lp;
    lp.c = random_vec(rng, n, 0.1, 2.0);
    int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_rows)));
    lp.A = Matrix(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) lp.A(i, j) = rng.normal();
    Vector x0 = random_vec(rng, n, 0.0, 1.0);
    lp.b = lp.A * x0 - random_vec(rng, m, 0.0, 0.5);
    return lp;
}

}  // namespace testsup
