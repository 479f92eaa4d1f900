#pragma once
// Discrete measures on a node set: dense nonnegative weight vectors, their
// potentials under a Gram form, and the bilinear energy pairing.

#include <capax/kernels.hpp>

#include <stdexcept>
#include <string>

namespace capax {

struct DiscreteMeasure {
    Vector weights;  // one nonnegative weight per node
    std::string node_set_id;

    DiscreteMeasure() = default;
    explicit DiscreteMeasure(Vector w, std::string id = {})
        : weights(std::move(w)), node_set_id(std::move(id)) {}

    int size() const { return static_cast<int>(weights.size()); }
    double mass() const { return weights.sum(); }

    SubsetMask support(double tol = 0.0) const {
        std::vector<int> idx;
        for (int i = 0; i < size(); ++i)
            if (weights(i) > tol) idx.push_back(i);
        return SubsetMask(std::move(idx));
    }

    DiscreteMeasure restricted_to(const SubsetMask& mask) const {
        DiscreteMeasure out = *this;
        out.weights.setZero();
        for (int i : mask.indices) out.weights(i) = weights(i);
        return out;
    }
};

using PotentialVector = Vector;

namespace detail {

inline void require_same_nodes(const GramForm& gram, const DiscreteMeasure& mu) {
    if (mu.size() != gram.size())
        throw std::invalid_argument("measure and gram form have different node counts");
    if (!mu.node_set_id.empty() && !gram.node_set_id.empty() &&
        mu.node_set_id != gram.node_set_id)
        throw std::invalid_argument("measure and gram form reference different node sets");
}

}  // namespace detail

inline PotentialVector potential(const GramForm& gram, const DiscreteMeasure& mu) {
    detail::require_same_nodes(gram, mu);
    return gram.K * mu.weights;
}

inline double mutual_energy(const GramForm& gram, const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu) {
    detail::require_same_nodes(gram, mu);
    detail::require_same_nodes(gram, nu);
    return mu.weights.dot(gram.K * nu.weights);
}

inline double energy(const GramForm& gram, const DiscreteMeasure& mu) {
    return mutual_energy(gram, mu, mu);
}

// G(mu) = 2 mass(mu) - energy(mu); maximized exactly by equilibrium measures,
// with optimal value equal to the capacity.
inline double g_functional(const GramForm& gram, const DiscreteMeasure& mu) {
    return 2.0 * mu.mass() - energy(gram, mu);
}

}  // namespace capax
