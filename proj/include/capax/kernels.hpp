#pragma once
// Symmetric kernel families and their discretization into positive definite
// Gram matrices. Off-diagonal entries are exact kernel evaluations; diagonal
// entries model the self-energy of a node's cell, with the dimensionless
// constant calibrated by Monte Carlo (importance-sampled so the integrand
// weight is constant and the variance stays finite for singular kernels).

#include <capax/geometry.hpp>
#include <capax/report.hpp>
#include <capax/rng.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

namespace capax {

struct RieszKernel {
    double alpha = 1.0;
    int dim = 3;
};
struct NewtonianKernel {
    int dim = 3;
};
struct LogarithmicKernel {};
struct MatrixKernel {
    Matrix entries;
};

using Kernel = std::variant<RieszKernel, NewtonianKernel, LogarithmicKernel, MatrixKernel>;

inline Kernel make_riesz(double alpha, int dim) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("riesz order must be in (0,2]");
    if (!(alpha < static_cast<double>(dim)))
        throw std::invalid_argument("riesz order must be below the space dimension");
    return RieszKernel{alpha, dim};
}

inline Kernel make_newtonian(int dim) {
    if (dim < 3) throw std::invalid_argument("newtonian kernel needs dimension >= 3");
    return NewtonianKernel{dim};
}

inline Kernel make_log() { return LogarithmicKernel{}; }

inline Kernel make_matrix(Matrix entries) {
    if (entries.rows() != entries.cols() || entries.rows() == 0)
        throw std::invalid_argument("matrix kernel must be square and nonempty");
    if (!entries.allFinite()) throw std::invalid_argument("matrix kernel entries must be finite");
    if ((entries - entries.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * (1.0 + entries.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("matrix kernel must be symmetric");
    return MatrixKernel{std::move(entries)};
}

// Radial profile as a function of distance; +infinity at coincident points.
inline double kernel_profile(const Kernel& kernel, double r) {
    if (r < 0.0) throw std::invalid_argument("negative distance");
    if (std::holds_alternative<MatrixKernel>(kernel))
        throw std::invalid_argument("matrix kernel has no radial profile");
    if (std::holds_alternative<LogarithmicKernel>(kernel)) {
        if (r >= 1.0)
            throw std::domain_error("logarithmic kernel requires sets of diameter below 1");
        if (r == 0.0) return std::numeric_limits<double>::infinity();
        return -std::log(r);
    }
    double alpha, dim;
    if (const auto* rz = std::get_if<RieszKernel>(&kernel)) {
        alpha = rz->alpha;
        dim = static_cast<double>(rz->dim);
    } else {
        alpha = 2.0;
        dim = static_cast<double>(std::get<NewtonianKernel>(kernel).dim);
    }
    if (r == 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(r, alpha - dim);
}

inline int kernel_space_dim(const Kernel& kernel) {
    if (const auto* rz = std::get_if<RieszKernel>(&kernel)) return rz->dim;
    if (const auto* nw = std::get_if<NewtonianKernel>(&kernel)) return nw->dim;
    return 0;  // log and matrix kernels do not pin a space dimension
}

inline double eval_kernel(const Kernel& kernel, const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("point dimension mismatch");
    int need = kernel_space_dim(kernel);
    if (need > 0 && x.size() != need)
        throw std::invalid_argument("point dimension does not match kernel dimension");
    return kernel_profile(kernel, (x - y).norm());
}

struct CellModel {
    NodeSet::CellShape shape = NodeSet::CellShape::cube;
    int dim = 0;  // intrinsic cell dimension
};

struct CalibrationResult {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

namespace detail {

inline bool in_unit_cell(NodeSet::CellShape shape, const Vector& p) {
    if (shape == NodeSet::CellShape::disc) return p.norm() <= 0.5;  // diameter-1 disc
    return p.minCoeff() >= 0.0 && p.maxCoeff() <= 1.0;              // side-1 cube
}

inline Vector sample_unit_cell(NodeSet::CellShape shape, int d, Rng& rng) {
    Vector p(d);
    if (shape == NodeSet::CellShape::disc) {
        for (;;) {
            for (int i = 0; i < d; ++i) p(i) = rng.uniform(-0.5, 0.5);
            if (p.norm() <= 0.5) return p;
        }
    }
    for (int i = 0; i < d; ++i) p(i) = rng.uniform();
    return p;
}

inline double unit_cell_volume(NodeSet::CellShape shape, int d) {
    if (shape == NodeSet::CellShape::disc) return M_PI / 4.0;  // radius 1/2, d == 2
    return 1.0;
}

inline double unit_sphere_area(int d) {
    // surface measure of S^{d-1}
    return 2.0 * std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0);
}

}  // namespace detail

// Mean kernel self-energy of a unit-size cell: the constant C with
// diag = C * h^(alpha - n) for power kernels, diag = -log h + C for the
// logarithmic kernel. Importance sampling draws the pair offset radius from
// p(r) proportional to r^(d-1+alpha-n) so each sample weight is constant
// (times the cell-membership indicator); variance is then finite whenever
// the cell dimension d exceeds n - alpha.
inline CalibrationResult self_energy_constant(const Kernel& kernel, const CellModel& cell,
                                              std::uint64_t samples = 400000,
                                              std::uint64_t seed = 0x5eedcafe) {
    if (std::holds_alternative<MatrixKernel>(kernel))
        throw std::invalid_argument("matrix kernels carry their own diagonal");
    if (samples < 100000) throw std::invalid_argument("need at least 1e5 samples");
    const int d = cell.dim;
    if (d < 1) throw std::invalid_argument("cell dimension must be positive");
    if (cell.shape == NodeSet::CellShape::disc && d != 2)
        throw std::invalid_argument("disc cells are two-dimensional");

    const bool logk = std::holds_alternative<LogarithmicKernel>(kernel);
    double alpha = 0.0, n = 0.0;
    if (!logk) {
        if (const auto* rz = std::get_if<RieszKernel>(&kernel)) {
            alpha = rz->alpha;
            n = static_cast<double>(rz->dim);
        } else {
            alpha = 2.0;
            n = static_cast<double>(std::get<NewtonianKernel>(kernel).dim);
        }
        if (!(static_cast<double>(d) > n - alpha))
            throw std::invalid_argument("cell dimension too low for kernel singularity");
    }

    // I = E_{x ~ U(cell)} (1/V) int_0^D int_{S^{d-1}} k(r) r^{d-1} 1[x+rw in cell] dw dr
    // with r drawn from p(r) = (beta+1) r^beta / D^(beta+1):
    //   power kernels: beta = d-1+alpha-n makes k(r) r^{d-1}/p(r) constant;
    //   log kernel:    beta = d-1 leaves the bounded factor -log r.
    const double D = cell.shape == NodeSet::CellShape::disc ? 1.0 : std::sqrt(static_cast<double>(d));
    const double beta = logk ? static_cast<double>(d - 1) : static_cast<double>(d - 1) + alpha - n;
    const double area = detail::unit_sphere_area(d);
    const double vol = detail::unit_cell_volume(cell.shape, d);
    const double base = area * std::pow(D, beta + 1.0) / ((beta + 1.0) * vol);

    Rng rng(seed);
    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        Vector x = detail::sample_unit_cell(cell.shape, d, rng);
        Vector w(d);
        for (;;) {
            double norm2 = 0.0;
            for (int i = 0; i < d; ++i) {
                w(i) = rng.normal();
                norm2 += w(i) * w(i);
            }
            if (norm2 > 1e-30) {
                w /= std::sqrt(norm2);
                break;
            }
        }
        double r = D * std::pow(rng.uniform(), 1.0 / (beta + 1.0));
        double val = 0.0;
        if (detail::in_unit_cell(cell.shape, x + r * w)) val = logk ? base * -std::log(r) : base;
        sum += val;
        sumsq += val * val;
    }
    CalibrationResult out;
    out.samples = samples;
    out.value = sum / static_cast<double>(samples);
    double var = std::max(0.0, sumsq / static_cast<double>(samples) - out.value * out.value);
    out.std_error = std::sqrt(var / static_cast<double>(samples));
    return out;
}

struct DiagPolicy {
    std::string description;
    double constant = 0.0;   // calibrated unit-cell constant (0 for matrix kernels)
    double std_error = 0.0;  // Monte Carlo standard error of that constant
};

struct GramForm {
    Matrix K;
    std::string node_set_id;
    DiagPolicy diag_policy;

    int size() const { return static_cast<int>(K.rows()); }
};

namespace detail {

inline const CalibrationResult& cached_constant(const Kernel& kernel, const CellModel& cell) {
    std::ostringstream key;
    if (const auto* rz = std::get_if<RieszKernel>(&kernel))
        key << "riesz:" << rz->alpha << ":" << rz->dim;
    else if (const auto* nw = std::get_if<NewtonianKernel>(&kernel))
        key << "newtonian:" << nw->dim;
    else
        key << "log";
    key << ":" << (cell.shape == NodeSet::CellShape::disc ? "disc" : "cube") << cell.dim;
    static std::map<std::string, CalibrationResult> cache;
    auto it = cache.find(key.str());
    if (it == cache.end()) it = cache.emplace(key.str(), self_energy_constant(kernel, cell)).first;
    return it->second;
}

inline void require_positive_definite(const Matrix& K, const std::string& what) {
    Matrix sym = 0.5 * (K + K.transpose());
    Eigen::LLT<Matrix> llt(sym);
    if (llt.info() == Eigen::Success) return;
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    std::ostringstream msg;
    msg << what << " is not positive definite (smallest eigenvalue "
        << es.eigenvalues().minCoeff() << ")";
    throw std::runtime_error(msg.str());
}

}  // namespace detail

inline GramForm assemble_gram(const Kernel& kernel, const NodeSet& nodes) {
    const int n = nodes.size();
    if (n == 0) throw std::invalid_argument("empty node set");
    GramForm g;
    g.node_set_id = nodes.id;
    if (const auto* mk = std::get_if<MatrixKernel>(&kernel)) {
        if (mk->entries.rows() != n)
            throw std::invalid_argument("matrix kernel size does not match node set");
        g.K = 0.5 * (mk->entries + mk->entries.transpose());
        g.diag_policy.description = "matrix entries taken verbatim";
        detail::require_positive_definite(g.K, "kernel matrix");
        return g;
    }

    const bool logk = std::holds_alternative<LogarithmicKernel>(kernel);
    double alpha = 0.0, sdim = 0.0;
    if (const auto* rz = std::get_if<RieszKernel>(&kernel)) {
        alpha = rz->alpha;
        sdim = static_cast<double>(rz->dim);
    } else if (const auto* nw = std::get_if<NewtonianKernel>(&kernel)) {
        alpha = 2.0;
        sdim = static_cast<double>(nw->dim);
    }

    CellModel cell{nodes.cell_shape, nodes.cell_dim};
    const CalibrationResult& cal = detail::cached_constant(kernel, cell);

    g.K.resize(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double v = kernel_profile(kernel, (nodes.points.row(i) - nodes.points.row(j)).norm());
            g.K(i, j) = v;
            g.K(j, i) = v;
        }
        double h = nodes.cell_sizes(i);
        if (h <= 0.0) throw std::invalid_argument("cell sizes must be positive");
        g.K(i, i) = logk ? -std::log(h) + cal.value : cal.value * std::pow(h, alpha - sdim);
    }
    if (logk) {
        // exact evaluations already reject distances >= 1; the diagonal model
        // additionally needs cells of diameter below 1
        if (g.K.diagonal().minCoeff() <= 0.0)
            throw std::domain_error("logarithmic kernel requires sets of diameter below 1");
    }
    std::ostringstream desc;
    desc << "cell self-energy, " << (cell.shape == NodeSet::CellShape::disc ? "disc" : "cube")
         << " model, dim " << cell.dim;
    g.diag_policy.description = desc.str();
    g.diag_policy.constant = cal.value;
    g.diag_policy.std_error = cal.std_error;
    detail::require_positive_definite(g.K, "discretized kernel");
    return g;
}

// Empirical check of the maximum principle: scale a random measure so its
// potential peaks at 1 on its own support, then look for larger values
// anywhere else. Report-only; trials with nonpositive support maxima are
// counted vacuous.
inline PrincipleReport check_frostman(const GramForm& gram, int trials = 200, double tol = 1e-9,
                                      std::uint64_t seed = 1) {
    const int n = gram.size();
    PrincipleReport rep;
    rep.trials = trials;
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        Vector w = Vector::Zero(n);
        int nnz = 0;
        for (int i = 0; i < n; ++i)
            if (rng.uniform() < 0.5) {
                w(i) = rng.uniform();
                ++nnz;
            }
        if (nnz == 0) w(static_cast<int>(rng.below(static_cast<std::uint64_t>(n)))) = rng.uniform(0.5, 1.0);
        Vector phi = gram.K * w;
        double peak = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i)
            if (w(i) > 0.0) peak = std::max(peak, phi(i));
        if (!(peak > 0.0)) {
            ++rep.vacuous;
            continue;
        }
        double excess = phi.maxCoeff() / peak - 1.0;
        rep.worst_violation = std::max(rep.worst_violation, excess);
        if (excess > tol) rep.pass = false;
    }
    return rep;
}

// Empirical check of the domination principle: scale mu so its potential is
// dominated by nu's on mu's support (tight at one node), then test the
// inequality everywhere.
inline PrincipleReport check_domination(const GramForm& gram, int trials = 200, double tol = 1e-9,
                                        std::uint64_t seed = 2) {
    const int n = gram.size();
    PrincipleReport rep;
    rep.trials = trials;
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        Vector mu = Vector::Zero(n), nu = Vector::Zero(n);
        for (int i = 0; i < n; ++i) {
            if (rng.uniform() < 0.5) mu(i) = rng.uniform();
            if (rng.uniform() < 0.5) nu(i) = rng.uniform();
        }
        if (mu.maxCoeff() <= 0.0) mu(static_cast<int>(rng.below(static_cast<std::uint64_t>(n)))) = 1.0;
        if (nu.maxCoeff() <= 0.0) nu(static_cast<int>(rng.below(static_cast<std::uint64_t>(n)))) = 1.0;
        Vector pmu = gram.K * mu, pnu = gram.K * nu;
        double scale = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (int i = 0; i < n; ++i)
            if (mu(i) > 0.0) {
                if (!(pmu(i) > 0.0)) {
                    ok = false;
                    break;
                }
                scale = std::min(scale, pnu(i) / pmu(i));
            }
        if (!ok || !(scale > 0.0) || !std::isfinite(scale)) {
            ++rep.vacuous;
            continue;
        }
        double gap = (scale * pmu - pnu).maxCoeff() / (1.0 + pnu.cwiseAbs().maxCoeff());
        rep.worst_violation = std::max(rep.worst_violation, gap);
        if (gap > tol) rep.pass = false;
    }
    return rep;
}

}  // namespace capax
