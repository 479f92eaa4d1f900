#include <catch2/catch_amalgamated.hpp>

#include <capax/qp.hpp>
#include <capax/rng.hpp>

#include "test_support.hpp"

using namespace capax;
using testsup::random_linear_ineq_qp;
using testsup::random_lp;
using testsup::random_nonneg_qp;
using testsup::random_simplex_qp;
using testsup::random_spd;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

}  // namespace

TEST_CASE("simplex QP on the 2x2 model: uniform minimizer, objective 3/4") {
    QpProblem p;
    p.Q = mat2(2, 1, 1, 2);
    p.b = Vector::Zero(2);
    p.constraint = ConstraintKind::simplex;
    auto rep = solve_qp(p);
    REQUIRE(rep.status == SolveStatus::converged);
    CHECK(rep.x(0) == Catch::Approx(0.5).margin(1e-10));
    CHECK(rep.x(1) == Catch::Approx(0.5).margin(1e-10));
    CHECK(rep.objective == Catch::Approx(0.75).margin(1e-10));
    CHECK(rep.kkt_residual <= 1e-9);
}

TEST_CASE("nonneg QP with interior solution solves the linear system") {
    QpProblem p;
    p.Q = mat2(2, 1, 1, 2);
    p.b = vec2(1, 1);
    p.constraint = ConstraintKind::nonneg;
    auto rep = solve_qp(p);
    REQUIRE(rep.status == SolveStatus::converged);
    CHECK(rep.x(0) == Catch::Approx(1.0 / 3).margin(1e-10));
    CHECK(rep.x(1) == Catch::Approx(1.0 / 3).margin(1e-10));
    CHECK(rep.active_set.empty());
}

TEST_CASE("nonneg QP clamps when the gradient points outward") {
    QpProblem p;
    p.Q = Matrix::Constant(1, 1, 1.0);
    p.b = Vector::Constant(1, -1.0);
    p.constraint = ConstraintKind::nonneg;
    auto rep = solve_qp(p);
    REQUIRE(rep.status == SolveStatus::converged);
    CHECK(rep.x(0) == 0.0);
    REQUIRE(rep.active_set.size() == 1);
    CHECK(rep.active_set[0] == 0);
}

TEST_CASE("LCP scalar cases") {
    auto interior = solve_lcp(Matrix::Constant(1, 1, 2.0), Vector::Constant(1, 1.0));
    REQUIRE(interior.status == SolveStatus::converged);
    CHECK(interior.x(0) == Catch::Approx(0.5).margin(1e-12));

    auto corner = solve_lcp(Matrix::Constant(1, 1, 2.0), Vector::Constant(1, -1.0));
    REQUIRE(corner.status == SolveStatus::converged);
    CHECK(corner.x(0) == 0.0);

    auto pair = solve_lcp(mat2(2, 1, 1, 2), vec2(1, 1));
    REQUIRE(pair.status == SolveStatus::converged);
    CHECK(pair.x(0) == Catch::Approx(1.0 / 3).margin(1e-12));
    CHECK(pair.x(1) == Catch::Approx(1.0 / 3).margin(1e-12));
}

TEST_CASE("LP vertex cases") {
    auto two = solve_lp(vec2(1, 1), mat2(2, 1, 1, 2), vec2(1, 1));
    REQUIRE(two.status == SolveStatus::converged);
    CHECK(two.objective == Catch::Approx(2.0 / 3).margin(1e-10));
    CHECK(two.x(0) == Catch::Approx(1.0 / 3).margin(1e-10));
    CHECK(two.x(1) == Catch::Approx(1.0 / 3).margin(1e-10));

    auto one = solve_lp(Vector::Constant(1, 1.0), Matrix::Constant(1, 1, 2.0),
                        Vector::Constant(1, 1.0));
    REQUIRE(one.status == SolveStatus::converged);
    CHECK(one.objective == Catch::Approx(0.5).margin(1e-12));

    auto origin = solve_lp(vec2(1, 1), mat2(2, 1, 1, 2), vec2(0, 0));
    REQUIRE(origin.status == SolveStatus::converged);
    CHECK(origin.objective == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("LP reports infeasible and unbounded instances") {
    auto inf = solve_lp(Vector::Constant(1, 1.0), Matrix::Constant(1, 1, -1.0),
                        Vector::Constant(1, 1.0));
    CHECK(inf.status == SolveStatus::infeasible);

    Matrix empty(0, 1);
    Vector none(0);
    auto unb = solve_lp(Vector::Constant(1, -1.0), empty, none);
    CHECK(unb.status == SolveStatus::unbounded);
}

TEST_CASE("brute-force oracle reproduces the hand values exactly") {
    QpProblem nn;
    nn.Q = mat2(2, 1, 1, 2);
    nn.b = vec2(1, 1);
    nn.constraint = ConstraintKind::nonneg;
    auto rep = brute_force_oracle(nn);
    REQUIRE(rep.status == SolveStatus::converged);
    CHECK(rep.x(0) == Catch::Approx(1.0 / 3).margin(1e-14));

    nn.b = Vector::Zero(2);
    nn.constraint = ConstraintKind::simplex;
    auto simp = brute_force_oracle(nn);
    REQUIRE(simp.status == SolveStatus::converged);
    CHECK(simp.x(0) == Catch::Approx(0.5).margin(1e-14));
    CHECK(simp.x(1) == Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("brute-force oracle rejects oversized problems") {
    QpProblem p;
    p.Q = Matrix::Identity(13, 13);
    p.b = Vector::Zero(13);
    CHECK_THROWS_AS(brute_force_oracle(p), std::invalid_argument);
}

TEST_CASE("iterative solvers match the oracle on random instances") {
    Rng rng(20260814);
    const int trials = 120;
    for (int t = 0; t < trials; ++t) {
        int n = 2 + static_cast<int>(rng.below(7));  // dimensions 2..8

        auto nn = random_nonneg_qp(rng, n);
        auto it_nn = solve_qp(nn);
        auto or_nn = brute_force_oracle(nn);
        REQUIRE(it_nn.status == SolveStatus::converged);
        REQUIRE(or_nn.status == SolveStatus::converged);
        CHECK(std::abs(it_nn.objective - or_nn.objective) <= 1e-8);
        CHECK((it_nn.x - or_nn.x).lpNorm<Eigen::Infinity>() <= 1e-6);

        auto sx = random_simplex_qp(rng, n);
        auto it_sx = solve_qp(sx);
        auto or_sx = brute_force_oracle(sx);
        REQUIRE(it_sx.status == SolveStatus::converged);
        CHECK(std::abs(it_sx.objective - or_sx.objective) <= 1e-8);
        CHECK((it_sx.x - or_sx.x).lpNorm<Eigen::Infinity>() <= 1e-6);

        auto li = random_linear_ineq_qp(rng, n);
        auto it_li = solve_qp(li);
        auto or_li = brute_force_oracle(li);
        REQUIRE(it_li.status == SolveStatus::converged);
        REQUIRE(or_li.status == SolveStatus::converged);
        CHECK(std::abs(it_li.objective - or_li.objective) <= 1e-8);
        CHECK((it_li.x - or_li.x).lpNorm<Eigen::Infinity>() <= 1e-6);
    }
}

TEST_CASE("LCP equals the nonneg QP with M, q as data") {
    Rng rng(7151623);
    for (int t = 0; t < 120; ++t) {
        int n = 2 + static_cast<int>(rng.below(7));
        QpProblem p = random_nonneg_qp(rng, n);
        auto qp = solve_qp(p);
        auto lcp = solve_lcp(p.Q, p.b);
        REQUIRE(lcp.status == SolveStatus::converged);
        CHECK((qp.x - lcp.x).lpNorm<Eigen::Infinity>() <= 1e-7);
        CHECK(std::abs(qp.objective - lcp.objective) <= 1e-9);
    }
}

TEST_CASE("LP matches brute-force vertex enumeration on random instances") {
    Rng rng(90210);
    for (int t = 0; t < 120; ++t) {
        int n = 2 + static_cast<int>(rng.below(7));
        auto lp = random_lp(rng, n);
        auto it = solve_lp(lp.c, lp.A, lp.b);
        auto oracle = brute_force_lp(lp.c, lp.A, lp.b);
        REQUIRE(it.status == SolveStatus::converged);
        REQUIRE(oracle.status == SolveStatus::converged);
        CHECK(std::abs(it.objective - oracle.objective) <= 1e-8);
    }
}

TEST_CASE("nonneg solutions scale linearly in b") {
    Rng rng(5150);
    for (int t = 0; t < 40; ++t) {
        int n = 2 + static_cast<int>(rng.below(7));
        QpProblem p = random_nonneg_qp(rng, n);
        double h = rng.uniform(0.2, 5.0);
        QpProblem ph = p;
        ph.b *= h;
        auto base = solve_qp(p);
        auto scaled = solve_qp(ph);
        CHECK((scaled.x - h * base.x).lpNorm<Eigen::Infinity>() <= 1e-7 * (1.0 + h));
    }
}

TEST_CASE("ill-conditioned matrices get a recorded Tikhonov shift") {
    QpProblem p;
    p.Q = Matrix::Zero(2, 2);
    p.Q(0, 0) = 1.0;
    p.Q(1, 1) = 1e14;
    p.b = vec2(1, 1);
    p.constraint = ConstraintKind::nonneg;
    auto rep = solve_qp(p);
    CHECK(rep.tikhonov_shift > 0.0);
    CHECK(rep.tikhonov_shift == Catch::Approx(1e-12 * (1.0 + 1e14) / 2).epsilon(1e-6));
}

TEST_CASE("indefinite matrices are rejected") {
    QpProblem p;
    p.Q = mat2(1, 2, 2, 1);  // eigenvalues 3, -1
    p.b = vec2(0, 0);
    p.constraint = ConstraintKind::nonneg;
    CHECK_THROWS_AS(solve_qp(p), std::invalid_argument);
}

TEST_CASE("infeasible linear inequalities are reported") {
    QpProblem p;
    p.Q = Matrix::Identity(1, 1);
    p.b = Vector::Zero(1);
    p.constraint = ConstraintKind::linear_ineq;
    p.A_mat = Matrix::Constant(1, 1, -1.0);
    p.c_vec = Vector::Constant(1, 1.0);
    auto rep = solve_qp(p);
    CHECK(rep.status == SolveStatus::infeasible);
}

TEST_CASE("obstacle-shaped linear_ineq instance lands on the equilibrium point") {
    QpProblem p;
    p.Q = 2.0 * mat2(2, 1, 1, 2);
    p.b = Vector::Zero(2);
    p.constraint = ConstraintKind::linear_ineq;
    p.A_mat = mat2(2, 1, 1, 2);
    p.c_vec = vec2(1, 1);
    auto rep = solve_qp(p);
    REQUIRE(rep.status == SolveStatus::converged);
    CHECK(rep.x(0) == Catch::Approx(1.0 / 3).margin(1e-9));
    CHECK(rep.x(1) == Catch::Approx(1.0 / 3).margin(1e-9));
    CHECK(rep.objective == Catch::Approx(2.0 / 3).margin(1e-9));
}
