#pragma once
// Monotone-family harnesses: capacities, equilibrium measures, and
// equilibrium potentials along increasing and decreasing nested set
// families, the energy-gap identity between nested equilibrium measures,
// and pointwise potential monotonicity.

#include <capax/capacity.hpp>
#include <capax/geometry.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace capax {

struct StageRow {
    int stage = 0;
    double capacity = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double max_potential_violation = 0.0;  // worst shortfall of the unit level on the stage set
};

struct ConvergenceReport {
    std::vector<StageRow> rows;
    std::vector<DiscreteMeasure> gammas;  // per-stage equilibrium measures
    EquilibriumResult limit;              // direct solve on the limit set
    CheckReport checks;
};

namespace detail {

inline StageRow stage_row(const GramForm& gram, const SubsetMask& mask, int index,
                          const EquilibriumResult& eq) {
    StageRow row;
    row.stage = index;
    row.capacity = eq.capacity;
    row.mass = eq.gamma.mass();
    row.energy = energy(gram, eq.gamma);
    Vector phi = gram.K * eq.gamma.weights;
    for (int i : mask.indices)
        row.max_potential_violation = std::max(row.max_potential_violation, 1.0 - phi(i));
    row.max_potential_violation = std::max(0.0, row.max_potential_violation);
    return row;
}

inline double energy_dist(const GramForm& gram, const Vector& a, const Vector& b) {
    Vector d = a - b;
    return std::sqrt(std::max(0.0, d.dot(gram.K * d)));
}

}  // namespace detail

// Increasing stages grow to the target set: capacities are nondecreasing
// with the direct solve as limit, stage measures converge in energy norm,
// and (under certified principles) stage potentials rise pointwise toward
// the limit potential.
inline ConvergenceReport run_increasing(const GramForm& gram, const Exhaustion& exhaustion,
                                        double tol = 1e-7) {
    if (exhaustion.mode != ExhaustionMode::increasing)
        throw std::invalid_argument("expected an increasing exhaustion");
    if (exhaustion.stages.empty()) throw std::invalid_argument("no stages");
    ConvergenceReport out;
    for (std::size_t j = 0; j < exhaustion.stages.size(); ++j) {
        EquilibriumResult eq = capacity_dual(gram, exhaustion.stages[j]);
        out.rows.push_back(
            detail::stage_row(gram, exhaustion.stages[j], static_cast<int>(j), eq));
        out.gammas.push_back(eq.gamma);
    }
    out.limit = capacity_dual(gram, exhaustion.union_mask);

    const bool certified = check_frostman(gram, 200, 1e-9, 31).pass &&
                           check_domination(gram, 200, 1e-9, 32).pass;
    const std::size_t last = out.rows.size() - 1;
    const double cscale = 1.0 + std::abs(out.limit.capacity);
    for (std::size_t j = 0; j + 1 < out.rows.size(); ++j)
        out.checks.record(out.rows[j + 1].capacity >= out.rows[j].capacity - tol * cscale,
                          out.rows[j].capacity - out.rows[j + 1].capacity,
                          "capacity nondecreasing at stage " + std::to_string(j + 1));
    out.checks.record(std::abs(out.rows[last].capacity - out.limit.capacity) <= tol * cscale,
                      std::abs(out.rows[last].capacity - out.limit.capacity),
                      "final capacity equals direct solve");

    std::vector<double> dist(out.rows.size());
    for (std::size_t j = 0; j < out.rows.size(); ++j)
        dist[j] = detail::energy_dist(gram, out.gammas[j].weights, out.limit.gamma.weights);
    for (std::size_t j = 0; j + 1 < dist.size(); ++j)
        out.checks.record(dist[j + 1] <= dist[j] + tol, dist[j + 1] - dist[j],
                          "distance to limit nonincreasing at stage " + std::to_string(j + 1));
    out.checks.record(dist[last] <= tol, dist[last], "final measure reaches the limit");

    if (certified) {
        Vector plim = gram.K * out.limit.gamma.weights;
        double pscale = 1.0 + plim.cwiseAbs().maxCoeff();
        Vector prev = gram.K * out.gammas[0].weights;
        for (std::size_t j = 0; j + 1 < out.gammas.size(); ++j) {
            Vector next = gram.K * out.gammas[j + 1].weights;
            out.checks.record((prev - next).maxCoeff() <= tol * pscale,
                              (prev - next).maxCoeff(),
                              "potential nondecreasing at stage " + std::to_string(j + 1));
            prev = next;
        }
        for (std::size_t j = 0; j < out.gammas.size(); ++j) {
            Vector pj = gram.K * out.gammas[j].weights;
            out.checks.record((pj - plim).maxCoeff() <= tol * pscale, (pj - plim).maxCoeff(),
                              "potential below limit at stage " + std::to_string(j));
        }
    } else {
        out.checks.skip("potential monotonicity: principles not certified");
    }
    return out;
}

// Decreasing stages shrink toward their intersection (the final stage):
// capacities are nonincreasing, measures converge, and potentials fall
// pointwise under certified principles.
inline ConvergenceReport run_decreasing(const GramForm& gram,
                                        const std::vector<SubsetMask>& stages,
                                        double tol = 1e-7) {
    if (stages.empty()) throw std::invalid_argument("no stages");
    for (std::size_t j = 1; j < stages.size(); ++j)
        if (!stages[j].is_subset_of(stages[j - 1]))
            throw std::invalid_argument("stages must be decreasing by inclusion");
    ConvergenceReport out;
    for (std::size_t j = 0; j < stages.size(); ++j) {
        EquilibriumResult eq = capacity_dual(gram, stages[j]);
        out.rows.push_back(detail::stage_row(gram, stages[j], static_cast<int>(j), eq));
        out.gammas.push_back(eq.gamma);
    }
    out.limit = capacity_dual(gram, stages.back());

    const bool certified = check_frostman(gram, 200, 1e-9, 33).pass &&
                           check_domination(gram, 200, 1e-9, 34).pass;
    const double cscale = 1.0 + std::abs(out.rows.front().capacity);
    for (std::size_t j = 0; j + 1 < out.rows.size(); ++j)
        out.checks.record(out.rows[j + 1].capacity <= out.rows[j].capacity + tol * cscale,
                          out.rows[j + 1].capacity - out.rows[j].capacity,
                          "capacity nonincreasing at stage " + std::to_string(j + 1));
    out.checks.record(
        std::abs(out.rows.back().capacity - out.limit.capacity) <= tol * cscale,
        std::abs(out.rows.back().capacity - out.limit.capacity),
        "final capacity equals direct solve");
    double final_dist =
        detail::energy_dist(gram, out.gammas.back().weights, out.limit.gamma.weights);
    out.checks.record(final_dist <= tol, final_dist, "final measure reaches the limit");

    if (certified) {
        double pscale = 1.0 + (gram.K * out.gammas.front().weights).cwiseAbs().maxCoeff();
        for (std::size_t j = 0; j + 1 < out.gammas.size(); ++j) {
            Vector pj = gram.K * out.gammas[j].weights;
            Vector pn = gram.K * out.gammas[j + 1].weights;
            out.checks.record((pn - pj).maxCoeff() <= tol * pscale, (pn - pj).maxCoeff(),
                              "potential nonincreasing at stage " + std::to_string(j + 1));
        }
    } else {
        out.checks.skip("potential monotonicity: principles not certified");
    }
    return out;
}

// Between nested sets H inside A, the squared energy distance of the two
// equilibrium measures never exceeds the capacity gap; with the Frostman
// principle certified the two sides coincide.
inline CheckReport energy_gap_check(const GramForm& gram, const SubsetMask& A,
                                    const SubsetMask& H, double tol_eq = 1e-8) {
    if (!H.is_subset_of(A)) throw std::invalid_argument("H must be contained in A");
    CheckReport rep;
    EquilibriumResult ga = capacity_dual(gram, A);
    EquilibriumResult gh = capacity_dual(gram, H);
    Vector d = ga.gamma.weights - gh.gamma.weights;
    double lhs = d.dot(gram.K * d);
    double rhs = energy(gram, ga.gamma) - energy(gram, gh.gamma);
    double scale = 1.0 + std::abs(rhs);
    rep.record(lhs <= rhs + tol_eq * scale, lhs - rhs, "squared distance within energy gap");
    if (check_frostman(gram, 200, 1e-9, 35).pass)
        rep.record(std::abs(lhs - rhs) <= tol_eq * scale, std::abs(lhs - rhs),
                   "energy gap attained exactly");
    else
        rep.skip("gap equality: principle not certified");
    return rep;
}

// The equilibrium potential grows with the set: K gamma_H <= K gamma_A
// pointwise for H inside A, given certified principles.
inline CheckReport potential_monotonicity_check(const GramForm& gram, const SubsetMask& A,
                                                const SubsetMask& H, double tol = 1e-7) {
    if (!H.is_subset_of(A)) throw std::invalid_argument("H must be contained in A");
    CheckReport rep;
    if (!(check_frostman(gram, 200, 1e-9, 36).pass &&
          check_domination(gram, 200, 1e-9, 37).pass)) {
        rep.skip("principles not certified");
        return rep;
    }
    Vector pa = gram.K * capacity_dual(gram, A).gamma.weights;
    Vector ph = gram.K * capacity_dual(gram, H).gamma.weights;
    double scale = 1.0 + pa.cwiseAbs().maxCoeff();
    int worst = 0;
    double gap = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < gram.size(); ++i)
        if (ph(i) - pa(i) > gap) {
            gap = ph(i) - pa(i);
            worst = i;
        }
    rep.record(gap <= tol * scale, gap,
               "potential of subset below superset (worst node " + std::to_string(worst) + ")");
    return rep;
}

}  // namespace capax
