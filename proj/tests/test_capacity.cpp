#include <capax/capacity.hpp>
#include <capax/oracle.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace capax;

namespace {

GramForm hand_gram() {
    Matrix K(2, 2);
    K << 2, 1, 1, 2;
    return gram_from_matrix(K);
}

SubsetMask random_mask(Rng& rng, int n) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
        if (rng.uniform() < 0.6) idx.push_back(i);
    if (idx.empty()) idx.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
    return SubsetMask(idx);
}

}  // namespace

TEST_CASE("primal formulation on the hand instance") {
    GramForm g = hand_gram();
    EquilibriumResult r = capacity_primal(g, SubsetMask::full(2));
    REQUIRE(r.robin == Catch::Approx(1.5).epsilon(1e-10));
    REQUIRE(r.capacity == Catch::Approx(2.0 / 3.0).epsilon(1e-10));
    REQUIRE(r.lambda.weights(0) == Catch::Approx(0.5).epsilon(1e-9));
    REQUIRE(r.lambda.mass() == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE(r.gamma.weights(0) == Catch::Approx(1.0 / 3.0).epsilon(1e-9));
    REQUIRE(r.xi.weights(0) == Catch::Approx(r.lambda.weights(0)).epsilon(1e-9));
    REQUIRE(r.formulation == "primal");
    REQUIRE(r.report.status == SolveStatus::converged);

    EquilibriumResult one = capacity_primal(g, SubsetMask(std::vector<int>{0}));
    REQUIRE(one.robin == Catch::Approx(2.0));
    REQUIRE(one.capacity == Catch::Approx(0.5));
    REQUIRE(one.gamma.weights(0) == Catch::Approx(0.5));
    REQUIRE(one.gamma.weights(1) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("dual formulation maximizes the g-functional") {
    GramForm g = hand_gram();
    EquilibriumResult r = capacity_dual(g, SubsetMask::full(2));
    REQUIRE(r.capacity == Catch::Approx(2.0 / 3.0).epsilon(1e-10));
    REQUIRE(r.gamma.weights(0) == Catch::Approx(1.0 / 3.0).epsilon(1e-9));
    REQUIRE(r.gamma.weights(1) == Catch::Approx(1.0 / 3.0).epsilon(1e-9));

    Matrix K1(1, 1);
    K1 << 2;
    EquilibriumResult s = capacity_dual(gram_from_matrix(K1), SubsetMask::full(1));
    REQUIRE(s.capacity == Catch::Approx(0.5));
    REQUIRE(s.gamma.weights(0) == Catch::Approx(0.5));
}

TEST_CASE("obstacle formulation minimizes energy over the unit-level class") {
    GramForm g = hand_gram();
    EquilibriumResult r = capacity_obstacle(g, SubsetMask::full(2));
    REQUIRE(r.capacity == Catch::Approx(2.0 / 3.0).epsilon(1e-9));
    REQUIRE(r.gamma.weights(0) == Catch::Approx(1.0 / 3.0).epsilon(1e-8));

    EquilibriumResult part = capacity_obstacle(g, SubsetMask(std::vector<int>{0}));
    REQUIRE(part.capacity == Catch::Approx(0.5).epsilon(1e-9));
    REQUIRE(part.gamma.weights(0) == Catch::Approx(0.5).epsilon(1e-8));
    REQUIRE(part.gamma.weights(1) == Catch::Approx(0.0).margin(1e-9));

    REQUIRE_THROWS_AS(
        capacity_obstacle(g, SubsetMask::full(2), SubsetMask(std::vector<int>{0})),
        std::invalid_argument);
}

TEST_CASE("minimum-mass linear program returns the capacity") {
    GramForm g = hand_gram();
    SolveReport r = capacity_min_mass(g, SubsetMask::full(2));
    REQUIRE(r.status == SolveStatus::converged);
    REQUIRE(r.objective == Catch::Approx(2.0 / 3.0).epsilon(1e-10));
    REQUIRE(r.x(0) == Catch::Approx(1.0 / 3.0).epsilon(1e-9));

    Matrix K1(1, 1);
    K1 << 2;
    SolveReport s = capacity_min_mass(gram_from_matrix(K1), SubsetMask::full(1));
    REQUIRE(s.objective == Catch::Approx(0.5));

    SolveReport e = capacity_min_mass(g, SubsetMask{});
    REQUIRE(e.objective == 0.0);
}

TEST_CASE("minimum-mass is skipped when a maximum principle fails") {
    Matrix F(2, 2);
    F << 1.0, 1.2, 1.2, 2.0;  // violates the first maximum principle
    GramForm g;
    g.K = F;
    SolveReport r = capacity_min_mass(g, SubsetMask::full(2));
    REQUIRE(r.status == SolveStatus::skipped);
}

TEST_CASE("mass-maximization under a unit potential cap") {
    GramForm g = hand_gram();
    SolveReport r = capacity_mass_max(g, SubsetMask::full(2));
    REQUIRE(r.objective == Catch::Approx(2.0 / 3.0).epsilon(1e-10));
    REQUIRE(r.x(0) == Catch::Approx(1.0 / 3.0).epsilon(1e-9));

    SolveReport one = capacity_mass_max(g, SubsetMask(std::vector<int>{0}));
    // mass at node 0 only, potential constraints 2v <= 1 and v <= 1
    REQUIRE(one.objective == Catch::Approx(0.5).epsilon(1e-10));
    REQUIRE(one.x(1) == 0.0);
}

TEST_CASE("empty target set has zero capacity by convention") {
    GramForm g = hand_gram();
    for (auto r : {capacity_primal(g, SubsetMask{}), capacity_dual(g, SubsetMask{}),
                   capacity_obstacle(g, SubsetMask{})}) {
        REQUIRE(r.capacity == 0.0);
        REQUIRE(std::isinf(r.robin));
        REQUIRE(r.gamma.weights.cwiseAbs().maxCoeff() == 0.0);
    }
    REQUIRE_THROWS_AS(capacity_dual(g, SubsetMask(std::vector<int>{5})), std::invalid_argument);
}

TEST_CASE("equilibrium identities hold on random certified kernels") {
    Rng rng(4257);
    for (int t = 0; t < 40; ++t) {
        int n = 2 + static_cast<int>(rng.below(7));
        Kernel k = generate_certified_kernel(n, 90000 + t);
        GramForm g = gram_from_matrix(std::get<MatrixKernel>(k).entries);
        SubsetMask A = random_mask(rng, n);
        EquilibriumResult r = capacity_dual(g, A);
        double m = r.gamma.mass(), e = energy(g, r.gamma);
        REQUIRE(std::abs(m - e) <= 1e-8);
        REQUIRE(std::abs(m - r.capacity) <= 1e-8);
        CheckReport idc = equilibrium_identity_check(g, A, r.gamma, r.capacity);
        INFO((idc.failures.empty() ? std::string("ok") : idc.failures.front()));
        REQUIRE(idc.pass);
    }
}

TEST_CASE("capacity is monotone and subadditive") {
    Rng rng(5512);
    for (int t = 0; t < 40; ++t) {
        int n = 3 + static_cast<int>(rng.below(6));
        Kernel k = generate_certified_kernel(n, 70000 + t);
        GramForm g = gram_from_matrix(std::get<MatrixKernel>(k).entries);
        SubsetMask A = random_mask(rng, n);
        SubsetMask B = random_mask(rng, n);
        std::vector<int> uni = A.indices;
        uni.insert(uni.end(), B.indices.begin(), B.indices.end());
        SubsetMask U(uni);
        double cA = capacity_dual(g, A).capacity;
        double cB = capacity_dual(g, B).capacity;
        double cU = capacity_dual(g, U).capacity;
        REQUIRE(cA <= cU + 1e-9);  // A is a subset of the union
        REQUIRE(cB <= cU + 1e-9);
        REQUIRE(cU <= cA + cB + 1e-9);
    }
}

TEST_CASE("dual formulation scales covariantly with the constraint level") {
    GramForm g = hand_gram();
    const double t = 2.5;
    QpProblem base;
    base.Q = g.K;
    base.b = Vector::Ones(2);
    base.constraint = ConstraintKind::nonneg;
    QpProblem scaled = base;
    scaled.b = t * Vector::Ones(2);
    SolveReport rb = solve_qp(base), rs = solve_qp(scaled);
    REQUIRE((rs.x - t * rb.x).cwiseAbs().maxCoeff() <= 1e-9);
    // G-value at level t is t^2 times the level-1 value
    double g1 = 2.0 * rb.x.sum() - rb.x.dot(g.K * rb.x);
    double gt = 2.0 * t * rs.x.sum() - rs.x.dot(g.K * rs.x);
    REQUIRE(gt == Catch::Approx(t * t * g1).epsilon(1e-9));
}

TEST_CASE("minimum-potential property of the equilibrium measure") {
    GramForm g = hand_gram();
    SubsetMask A = SubsetMask::full(2);
    EquilibriumResult eq = capacity_dual(g, A);

    std::vector<DiscreteMeasure> cands;
    cands.emplace_back(Vector::Ones(2));  // potential (3,3) >= 1
    cands.push_back(eq.gamma);            // equality case
    Vector big(2);
    big << 0.9, 0.4;
    cands.emplace_back(big);
    CheckReport rep = min_potential_check(g, A, cands);
    REQUIRE(rep.pass);
    REQUIRE(rep.checks_run == 3);
    REQUIRE(rep.skipped == 0);

    // an infeasible candidate is rejected, not failed
    Vector tiny(2);
    tiny << 0.01, 0.0;
    CheckReport rej = min_potential_check(g, A, {DiscreteMeasure(tiny)});
    REQUIRE(rej.pass);
    REQUIRE(rej.checks_run == 0);
    REQUIRE(rej.skipped == 1);
}

TEST_CASE("minimum-potential property on sampled feasible candidates") {
    Rng rng(6003);
    for (int t = 0; t < 25; ++t) {
        int n = 2 + static_cast<int>(rng.below(7));
        Kernel k = generate_certified_kernel(n, 80000 + t);
        GramForm g = gram_from_matrix(std::get<MatrixKernel>(k).entries);
        SubsetMask A = random_mask(rng, n);
        EquilibriumResult eq = capacity_dual(g, A);
        std::vector<DiscreteMeasure> cands;
        for (int j = 0; j < 4; ++j) {
            Vector w = eq.gamma.weights;
            for (int i = 0; i < n; ++i) w(i) += rng.uniform() * 0.5;
            cands.emplace_back(w);
        }
        Vector lifted = eq.gamma.weights * (1.0 + rng.uniform());
        cands.emplace_back(lifted);
        CheckReport rep = min_potential_check(g, A, cands);
        INFO((rep.failures.empty() ? std::string("ok") : rep.failures.front()));
        REQUIRE(rep.pass);
        REQUIRE(rep.skipped == 0);
    }
}

TEST_CASE("positivity of mass on the hand pair and premise filtering") {
    GramForm g = hand_gram();
    Vector mu(2), nu(2);
    mu << 0.5, 0.0;
    nu << 1.0 / 3.0, 1.0 / 3.0;
    std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>> pairs;
    pairs.emplace_back(DiscreteMeasure(mu), DiscreteMeasure(nu));   // (1, 1/2) <= (1, 1)
    pairs.emplace_back(DiscreteMeasure(nu), DiscreteMeasure(nu));   // equality
    pairs.emplace_back(DiscreteMeasure(nu), DiscreteMeasure(mu));   // premise fails
    CheckReport rep = mass_positivity_check(g, pairs);
    REQUIRE(rep.pass);
    REQUIRE(rep.checks_run == 2);
    REQUIRE(rep.skipped == 1);
}

TEST_CASE("positivity of mass over restricted-and-rescaled pairs") {
    Rng rng(7077);
    int done = 0;
    for (int t = 0; t < 30; ++t) {
        int n = 3 + static_cast<int>(rng.below(6));
        Kernel k = generate_certified_kernel(n, 60000 + t);
        GramForm g = gram_from_matrix(std::get<MatrixKernel>(k).entries);
        Vector nu(n);
        for (int i = 0; i < n; ++i) nu(i) = rng.uniform();
        Vector mu0 = nu;
        for (int i = 0; i < n; ++i)
            if (rng.uniform() < 0.5) mu0(i) = 0.0;
        if (mu0.maxCoeff() <= 0.0) continue;
        Vector pn = g.K * nu, pm = g.K * mu0;
        double scale = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i)
            if (pm(i) > 0.0) scale = std::min(scale, pn(i) / pm(i));
        std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>> pairs;
        pairs.emplace_back(DiscreteMeasure(Vector(scale * mu0)), DiscreteMeasure(nu));
        CheckReport rep = mass_positivity_check(g, pairs, 1e-9);
        REQUIRE(rep.pass);
        REQUIRE(rep.skipped == 0);
        ++done;
    }
    REQUIRE(done >= 25);
}

TEST_CASE("all formulations agree on hand and random instances") {
    GramForm g = hand_gram();
    CheckReport hand = verify_equilibrium_characterizations(g, SubsetMask::full(2));
    INFO((hand.failures.empty() ? std::string("ok") : hand.failures.front()));
    REQUIRE(hand.pass);
    REQUIRE(hand.skipped == 0);

    Matrix K1(1, 1);
    K1 << 2;
    CheckReport single =
        verify_equilibrium_characterizations(gram_from_matrix(K1), SubsetMask::full(1));
    REQUIRE(single.pass);

    Rng rng(8814);
    for (int t = 0; t < 30; ++t) {
        int n = 2 + static_cast<int>(rng.below(7));
        Kernel k = generate_certified_kernel(n, 50000 + t);
        GramForm gr = gram_from_matrix(std::get<MatrixKernel>(k).entries);
        SubsetMask A = random_mask(rng, n);
        CheckReport rep = verify_equilibrium_characterizations(gr, A);
        INFO("trial " << t << ": " << (rep.failures.empty() ? "ok" : rep.failures.front()));
        REQUIRE(rep.pass);
    }
}

TEST_CASE("iterative capacities match the enumeration oracle") {
    Rng rng(9911);
    for (int t = 0; t < 30; ++t) {
        int n = 2 + static_cast<int>(rng.below(7));
        Kernel k = generate_certified_kernel(n, 40000 + t);
        const Matrix& K = std::get<MatrixKernel>(k).entries;
        GramForm g = gram_from_matrix(K);
        SubsetMask A = random_mask(rng, n);
        EquilibriumResult ex = exact_equilibrium(K, A);
        for (const EquilibriumResult& r :
             {capacity_primal(g, A), capacity_dual(g, A), capacity_obstacle(g, A)}) {
            REQUIRE(std::abs(r.capacity - ex.capacity) <= 1e-8);
            REQUIRE((r.gamma.weights - ex.gamma.weights).cwiseAbs().maxCoeff() <= 1e-7);
        }
    }
}
