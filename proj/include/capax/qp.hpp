#pragma once
// Dense convex solvers over measure-cone constraint sets:
//   solve_qp  : min (1/2) x^T Q x - b^T x over {x >= 0}, the probability
//               simplex, or {A x >= c, x >= 0}; projected gradient with
//               Barzilai-Borwein steps finished by active-set refinement.
//               The linear-inequality case runs on the bound-constrained dual
//               and reconstructs the primal point.
//   solve_lcp : x >= 0, Mx - q >= 0, x^T (Mx - q) = 0 by Murty least-index
//               principal pivoting (a route independent of solve_qp).
//   solve_lp  : min c^T x s.t. A x >= b, x >= 0 by dense two-phase simplex
//               with Bland's rule.
//   brute_force_oracle / brute_force_lp : exhaustive active-set / vertex
//               enumeration, the exact reference for everything above.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "capax/indexing.hpp"
#include "capax/report.hpp"

namespace capax {

enum class ConstraintKind { nonneg, simplex, linear_ineq };

struct QpProblem {
    Matrix Q;  // symmetric positive definite
    Vector b;  // objective (1/2) x^T Q x - b^T x
    ConstraintKind constraint = ConstraintKind::nonneg;
    Matrix A_mat;  // linear_ineq only: rows of A_mat x >= c_vec
    Vector c_vec;
};

struct SolveReport {
    Vector x;
    double objective = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
    SolveStatus status = SolveStatus::converged;
    // Zero bounds x_i = 0 as i; for linear_ineq additionally active rows j as n + j.
    std::vector<int> active_set;
    double tikhonov_shift = 0.0;  // recorded diagonal shift, 0 when none
};

namespace detail {

inline double objective_value(const Matrix& Q, const Vector& b, const Vector& x) {
    return 0.5 * x.dot(Q * x) - b.dot(x);
}

// Largest eigenvalue estimate by power iteration; Q symmetric PSD.
inline double lambda_max_estimate(const Matrix& Q) {
    const Eigen::Index n = Q.rows();
    Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
    double lam = 1.0;
    for (int k = 0; k < 12; ++k) {
        Vector w = Q * v;
        double nw = w.norm();
        if (nw <= 0.0) return 1.0;
        lam = v.dot(w);
        v = w / nw;
    }
    return std::max(lam, 1e-300);
}

inline double lambda_min_estimate(const Eigen::LLT<Matrix>& llt, Eigen::Index n) {
    Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
    double growth = 1.0;
    for (int k = 0; k < 12; ++k) {
        Vector w = llt.solve(v);
        double nw = w.norm();
        if (nw <= 0.0) return 1.0;
        growth = nw;
        v = w / nw;
    }
    return 1.0 / growth;
}

// Euclidean projection onto {x >= 0, sum x = 1}.
inline Vector project_simplex(const Vector& v) {
    const Eigen::Index n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumsum = 0.0, theta = 0.0;
    int rho = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        cumsum += u[static_cast<std::size_t>(j)];
        double t = (cumsum - 1.0) / static_cast<double>(j + 1);
        if (u[static_cast<std::size_t>(j)] - t > 0.0) {
            rho = static_cast<int>(j + 1);
            theta = t;
        }
    }
    (void)rho;
    return (v.array() - theta).max(0.0).matrix();
}

// Fixed-point residual of the projected-gradient map for the given projector.
template <typename Proj>
inline double pg_residual(const Vector& x, const Vector& g, Proj&& proj) {
    return (x - proj(x - g)).template lpNorm<Eigen::Infinity>();
}

// Active-set polish for min (1/2) x^T Q x - b^T x over x >= 0. Starting from
// the sign pattern of x0, alternately drops negative free variables and frees
// the most violated stationarity index. Returns false if the loop exhausts
// its round budget without a clean KKT point.
inline bool polish_nonneg(const Matrix& Q, const Vector& b, Vector& x0) {
    const Eigen::Index n = Q.rows();
    const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
    std::vector<char> free_mask(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < n; ++i)
        free_mask[static_cast<std::size_t>(i)] = x0(i) > 1e-14 * scale ? 1 : 0;
    const int max_rounds = static_cast<int>(3 * n + 30);
    for (int round = 0; round < max_rounds; ++round) {
        std::vector<int> F;
        for (Eigen::Index i = 0; i < n; ++i)
            if (free_mask[static_cast<std::size_t>(i)]) F.push_back(static_cast<int>(i));
        Vector x = Vector::Zero(n);
        if (!F.empty()) {
            Matrix Qff = submatrix(Q, F, F);
            Vector y = Qff.llt().solve(subvector(b, F));
            int worst = -1;
            double worst_val = -1e-13 * scale;
            for (Eigen::Index k = 0; k < y.size(); ++k)
                if (y(k) < worst_val) { worst_val = y(k); worst = F[static_cast<std::size_t>(k)]; }
            if (worst >= 0) {
                free_mask[static_cast<std::size_t>(worst)] = 0;
                continue;
            }
            x = scatter(y.cwiseMax(0.0), F, n);
        }
        Vector g = Q * x - b;
        int add = -1;
        double add_val = -1e-12 * scale;
        for (Eigen::Index i = 0; i < n; ++i)
            if (!free_mask[static_cast<std::size_t>(i)] && g(i) < add_val) {
                add_val = g(i);
                add = static_cast<int>(i);
            }
        if (add >= 0) {
            free_mask[static_cast<std::size_t>(add)] = 1;
            continue;
        }
        x0 = x;
        return true;
    }
    return false;
}

// Active-set polish for the probability-simplex constraint via the bordered
// KKT system on the free set.
inline bool polish_simplex(const Matrix& Q, const Vector& b, Vector& x0) {
    const Eigen::Index n = Q.rows();
    const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>()) +
                         Q.diagonal().lpNorm<Eigen::Infinity>();
    std::vector<char> free_mask(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < n; ++i)
        free_mask[static_cast<std::size_t>(i)] = x0(i) > 1e-14 ? 1 : 0;
    if (std::count(free_mask.begin(), free_mask.end(), char(1)) == 0)
        free_mask[0] = 1;
    const int max_rounds = static_cast<int>(3 * n + 30);
    for (int round = 0; round < max_rounds; ++round) {
        std::vector<int> F;
        for (Eigen::Index i = 0; i < n; ++i)
            if (free_mask[static_cast<std::size_t>(i)]) F.push_back(static_cast<int>(i));
        const Eigen::Index f = static_cast<Eigen::Index>(F.size());
        // Stationarity on the free set is Q_FF x_F - lambda 1 = b_F, so the
        // multiplier column carries -1 and sol(f) is lambda itself.
        Matrix Kkt = Matrix::Zero(f + 1, f + 1);
        Kkt.topLeftCorner(f, f) = submatrix(Q, F, F);
        Kkt.topRightCorner(f, 1).setConstant(-1.0);
        Kkt.bottomLeftCorner(1, f).setOnes();
        Vector rhs(f + 1);
        rhs.head(f) = subvector(b, F);
        rhs(f) = 1.0;
        Vector sol = Kkt.partialPivLu().solve(rhs);
        Vector y = sol.head(f);
        double lambda = sol(f);
        int worst = -1;
        double worst_val = -1e-13;
        for (Eigen::Index k = 0; k < f; ++k)
            if (y(k) < worst_val) { worst_val = y(k); worst = F[static_cast<std::size_t>(k)]; }
        if (worst >= 0) {
            if (f <= 1) return false;
            free_mask[static_cast<std::size_t>(worst)] = 0;
            continue;
        }
        Vector x = scatter(y.cwiseMax(0.0), F, n);
        double mass = x.sum();
        if (mass > 0.0) x /= mass;  // removes roundoff drift in the equality
        Vector g = Q * x - b;
        int add = -1;
        double add_val = -1e-12 * scale;
        for (Eigen::Index i = 0; i < n; ++i)
            if (!free_mask[static_cast<std::size_t>(i)] && g(i) - lambda < add_val) {
                add_val = g(i) - lambda;
                add = static_cast<int>(i);
            }
        if (add >= 0) {
            free_mask[static_cast<std::size_t>(add)] = 1;
            continue;
        }
        x0 = x;
        return true;
    }
    return false;
}

// Shared Barzilai-Borwein projected-gradient loop. proj must be the Euclidean
// projector of the feasible set; polish sharpens the iterate when it succeeds.
template <typename Proj, typename Polish>
inline void pg_loop(const Matrix& Q, const Vector& b, Vector& x, double tol, int max_iter,
                    Proj&& proj, Polish&& polish, int& iterations, double& residual) {
    const double lam_max = lambda_max_estimate(Q);
    const double sqrt_tol = std::sqrt(tol);
    double t = 1.0 / lam_max;
    Vector g = Q * x - b;
    residual = pg_residual(x, g, proj);
    iterations = 0;
    bool bb_even = false;
    while (residual > tol && iterations < max_iter) {
        // Polish is a sub-factorization, so gate it: at entry, near the end,
        // or periodically as a fallback.
        if (iterations == 0 || iterations % 500 == 0 ||
            (residual < sqrt_tol && iterations % 25 == 0)) {
            Vector cand = x;
            if (polish(cand)) {
                Vector gc = Q * cand - b;
                double rc = pg_residual(cand, gc, proj);
                if (rc <= residual) {
                    x = cand;
                    g = gc;
                    residual = rc;
                    if (residual <= tol) break;
                }
            }
        }
        Vector xn = proj(x - t * g);
        Vector gn = Q * xn - b;
        Vector dx = xn - x, dg = gn - g;
        double dxdg = dx.dot(dg);
        if (dxdg > 0) {
            t = bb_even ? dx.squaredNorm() / dxdg : dxdg / dg.squaredNorm();
            bb_even = !bb_even;
            t = std::clamp(t, 1e-8 / lam_max, 1e8 / lam_max);
        }
        x = xn;
        g = gn;
        residual = pg_residual(x, g, proj);
        ++iterations;
    }
}

inline std::vector<int> zero_active_set(const Vector& x) {
    std::vector<int> act;
    const double thr = 1e-13 * (1.0 + x.lpNorm<Eigen::Infinity>());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x(i) <= thr) act.push_back(static_cast<int>(i));
    return act;
}

}  // namespace detail

// Condition-guarded PD factorization: throws on an indefinite matrix, applies
// and records a Tikhonov shift of 1e-12 * trace/n when the condition estimate
// exceeds 1e12.
inline Matrix guard_spd(const Matrix& Q_in, double& shift_out) {
    if (Q_in.rows() != Q_in.cols()) throw std::invalid_argument("Q must be square");
    Matrix Q = 0.5 * (Q_in + Q_in.transpose());
    shift_out = 0.0;
    Eigen::LLT<Matrix> llt(Q);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("Q is not positive definite");
    const double lam_max = detail::lambda_max_estimate(Q);
    const double lam_min = detail::lambda_min_estimate(llt, Q.rows());
    if (lam_max / std::max(lam_min, 1e-300) > 1e12) {
        shift_out = 1e-12 * Q.trace() / static_cast<double>(Q.rows());
        Q.diagonal().array() += shift_out;
    }
    return Q;
}

namespace detail {

inline SolveReport solve_nonneg(const Matrix& Q_in, const Vector& b, double tol, int max_iter) {
    SolveReport rep;
    Matrix Q = guard_spd(Q_in, rep.tikhonov_shift);
    Vector x = Q.llt().solve(b).cwiseMax(0.0);
    auto proj = [](const Vector& v) { return v.cwiseMax(0.0).eval(); };
    auto polish = [&](Vector& v) { return polish_nonneg(Q, b, v); };
    detail::pg_loop(Q, b, x, tol, max_iter, proj, polish, rep.iterations, rep.kkt_residual);
    rep.x = x;
    rep.objective = objective_value(Q_in, b, x);
    rep.status = rep.kkt_residual <= tol ? SolveStatus::converged : SolveStatus::max_iter;
    rep.active_set = zero_active_set(x);
    return rep;
}

inline SolveReport solve_simplex(const Matrix& Q_in, const Vector& b, double tol, int max_iter) {
    SolveReport rep;
    Matrix Q = guard_spd(Q_in, rep.tikhonov_shift);
    Vector x = project_simplex(Q.llt().solve(b));
    auto proj = [](const Vector& v) { return project_simplex(v); };
    auto polish = [&](Vector& v) { return polish_simplex(Q, b, v); };
    detail::pg_loop(Q, b, x, tol, max_iter, proj, polish, rep.iterations, rep.kkt_residual);
    rep.x = x;
    rep.objective = objective_value(Q_in, b, x);
    rep.status = rep.kkt_residual <= tol ? SolveStatus::converged : SolveStatus::max_iter;
    rep.active_set = zero_active_set(x);
    return rep;
}

// Linear-inequality case on the dual: with B = [A^T  I] and z = (y, s) >= 0,
// the dual of min (1/2) x^T Q x - b^T x s.t. Ax >= c, x >= 0 is
// min (1/2) z^T (B^T Q^{-1} B) z - (cc - B^T Q^{-1} b)^T z, cc = (c, 0),
// and the primal point is x = Q^{-1} (b + B z).
inline SolveReport solve_linear_ineq(const QpProblem& p, double tol, int max_iter) {
    SolveReport rep;
    const Eigen::Index n = p.Q.rows();
    const Eigen::Index m = p.A_mat.rows();
    if (m == 0) return solve_nonneg(p.Q, p.b, tol, max_iter);
    if (p.A_mat.cols() != n || p.c_vec.size() != m)
        throw std::invalid_argument("inconsistent linear_ineq dimensions");
    Matrix Q = guard_spd(p.Q, rep.tikhonov_shift);
    Eigen::LLT<Matrix> llt(Q);

    Matrix B(n, m + n);
    B.leftCols(m) = p.A_mat.transpose();
    B.rightCols(n) = Matrix::Identity(n, n);
    Matrix QinvB = llt.solve(B);
    Matrix H = B.transpose() * QinvB;
    H = 0.5 * (H + H.transpose());
    // H is rank-deficient whenever m > 0; a tiny ridge keeps the dual ascent
    // from drifting in the null space. Only the gradient steps see it: the
    // returned point is judged by the KKT residual of the true primal.
    H.diagonal().array() += 1e-12 * H.trace() / static_cast<double>(m + n);
    Vector cc(m + n);
    cc.head(m) = p.c_vec;
    cc.tail(n).setZero();
    Vector d = cc - B.transpose() * llt.solve(p.b);

    const double lam_max = lambda_max_estimate(H);
    const double blow_up = 1e12 * (1.0 + cc.lpNorm<Eigen::Infinity>() +
                                   p.b.lpNorm<Eigen::Infinity>());
    auto primal_of = [&](const Vector& z) { return llt.solve(p.b + B * z).eval(); };
    auto primal_kkt = [&](const Vector& z, const Vector& x) {
        Vector y = z.head(m), s = z.tail(n);
        Vector rowval = p.A_mat * x;
        double stat = (p.Q * x - p.b - p.A_mat.transpose() * y - s).lpNorm<Eigen::Infinity>();
        double pfeas = std::max(0.0, (p.c_vec - rowval).maxCoeff());
        pfeas = std::max(pfeas, std::max(0.0, -x.minCoeff()));
        double comp = 0.0;
        for (Eigen::Index j = 0; j < m; ++j)
            comp = std::max(comp, std::abs(y(j) * (rowval(j) - p.c_vec(j))));
        for (Eigen::Index i = 0; i < n; ++i)
            comp = std::max(comp, std::abs(s(i) * x(i)));
        const double den = 1.0 + x.lpNorm<Eigen::Infinity>();
        return std::max({stat, pfeas, comp / den});
    };

    Vector z = Vector::Zero(m + n);
    Vector g = H * z - d;
    double t = 1.0 / std::max(lam_max, 1e-300);
    bool bb_even = false;
    double res = std::numeric_limits<double>::infinity();
    int it = 0;
    // Primal active-set refinement: guess free variables F and active rows W
    // from the iterate, eliminate x through stationarity, solve the reduced
    // SPD system for y_W, and fix sign violations one index per round. On
    // success the returned (z, x) satisfies stationarity exactly.
    auto try_polish = [&](const Vector& z_hint, const Vector& x_hint, Vector& z_out,
                          Vector& x_out) -> bool {
        const double xthr = 1e-9 * (1.0 + x_hint.lpNorm<Eigen::Infinity>());
        const double sthr = 1e-9 * (1.0 + p.c_vec.lpNorm<Eigen::Infinity>());
        std::vector<char> in_F(static_cast<std::size_t>(n), 0);
        std::vector<char> in_W(static_cast<std::size_t>(m), 0);
        for (Eigen::Index i = 0; i < n; ++i)
            in_F[static_cast<std::size_t>(i)] = x_hint(i) > xthr ? 1 : 0;
        Vector slack0 = p.A_mat * x_hint - p.c_vec;
        for (Eigen::Index j = 0; j < m; ++j)
            in_W[static_cast<std::size_t>(j)] =
                (slack0(j) < sthr || z_hint(j) > 1e-8) ? 1 : 0;
        for (int round = 0; round < 80; ++round) {
            std::vector<int> F, W;
            for (Eigen::Index i = 0; i < n; ++i)
                if (in_F[static_cast<std::size_t>(i)]) F.push_back(static_cast<int>(i));
            for (Eigen::Index j = 0; j < m; ++j)
                if (in_W[static_cast<std::size_t>(j)]) W.push_back(static_cast<int>(j));
            Vector x = Vector::Zero(n);
            Vector y = Vector::Zero(m);
            if (!F.empty()) {
                Matrix Qff = submatrix(p.Q, F, F);
                Eigen::LLT<Matrix> sub(Qff);
                Vector bf = subvector(p.b, F);
                if (!W.empty()) {
                    Matrix Awf(static_cast<Eigen::Index>(W.size()),
                               static_cast<Eigen::Index>(F.size()));
                    for (std::size_t a = 0; a < W.size(); ++a)
                        for (std::size_t k = 0; k < F.size(); ++k)
                            Awf(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(k)) =
                                p.A_mat(W[a], F[k]);
                    Matrix G = Awf * sub.solve(Awf.transpose());
                    Vector r = subvector(p.c_vec, W) - Awf * sub.solve(bf);
                    Eigen::LDLT<Matrix> gs(G);
                    Vector yw = gs.solve(r);
                    if ((G * yw - r).lpNorm<Eigen::Infinity>() >
                        1e-9 * (1.0 + r.lpNorm<Eigen::Infinity>()))
                        yw = G.completeOrthogonalDecomposition().solve(r);
                    for (std::size_t a = 0; a < W.size(); ++a) y(W[a]) = yw(static_cast<Eigen::Index>(a));
                    x = scatter(sub.solve(bf + Awf.transpose() * yw), F, n);
                } else {
                    x = scatter(sub.solve(bf), F, n);
                }
            }
            // one sign correction per round, most negative first
            int drop_x = -1, drop_y = -1;
            double worst = -1e-11 * (1.0 + x.lpNorm<Eigen::Infinity>());
            for (int i : F)
                if (x(i) < worst) { worst = x(i); drop_x = i; drop_y = -1; }
            for (int j : W)
                if (y(j) < worst) { worst = y(j); drop_y = j; drop_x = -1; }
            if (drop_x >= 0) { in_F[static_cast<std::size_t>(drop_x)] = 0; continue; }
            if (drop_y >= 0) { in_W[static_cast<std::size_t>(drop_y)] = 0; continue; }
            Vector s = p.Q * x - p.b - p.A_mat.transpose() * y;
            Vector slack = p.A_mat * x - p.c_vec;
            int add_x = -1, add_w = -1;
            double worst_add = -1e-11 * (1.0 + p.b.lpNorm<Eigen::Infinity>());
            for (Eigen::Index i = 0; i < n; ++i)
                if (!in_F[static_cast<std::size_t>(i)] && s(i) < worst_add) {
                    worst_add = s(i);
                    add_x = static_cast<int>(i);
                    add_w = -1;
                }
            for (Eigen::Index j = 0; j < m; ++j)
                if (!in_W[static_cast<std::size_t>(j)] && slack(j) < worst_add) {
                    worst_add = slack(j);
                    add_w = static_cast<int>(j);
                    add_x = -1;
                }
            if (add_x >= 0) { in_F[static_cast<std::size_t>(add_x)] = 1; continue; }
            if (add_w >= 0) { in_W[static_cast<std::size_t>(add_w)] = 1; continue; }
            x_out = x.cwiseMax(0.0);
            z_out.resize(m + n);
            z_out.head(m) = y;
            z_out.tail(n) = s.cwiseMax(0.0);
            return true;
        }
        return false;
    };

    Vector x = primal_of(z);
    res = primal_kkt(z, x);
    const double sqrt_tol = std::sqrt(tol);
    while (res > tol && it < max_iter) {
        if (it == 0 || it % 500 == 0 || (res < sqrt_tol && it % 25 == 0)) {
            Vector zc, xc;
            if (try_polish(z, x, zc, xc)) {
                double rc = primal_kkt(zc, xc);
                if (rc <= res) {
                    z = zc;
                    g = H * z - d;
                    x = xc;
                    res = rc;
                    if (res <= tol) break;
                }
            }
        }
        Vector zn = (z - t * g).cwiseMax(0.0);
        Vector gn = H * zn - d;
        Vector dz = zn - z, dg = gn - g;
        double dzdg = dz.dot(dg);
        if (dzdg > 0) {
            t = bb_even ? dz.squaredNorm() / dzdg : dzdg / dg.squaredNorm();
            bb_even = !bb_even;
            t = std::clamp(t, 1e-8 / lam_max, 1e8 / lam_max);
        }
        z = zn;
        g = gn;
        ++it;
        if (it % 10 == 0 || res <= tol) {
            x = primal_of(z);
            res = primal_kkt(z, x);
        }
        if (z.lpNorm<Eigen::Infinity>() > blow_up) {
            rep.status = SolveStatus::infeasible;
            rep.x = Vector::Zero(n);
            rep.iterations = it;
            rep.kkt_residual = res;
            return rep;
        }
    }
    {
        Vector x2 = primal_of(z);
        double res2 = primal_kkt(z, x2);
        if (res2 < res) { x = x2; res = res2; }
    }
    rep.iterations = it;
    rep.kkt_residual = res;
    double pfeas = std::max(0.0, (p.c_vec - p.A_mat * x).maxCoeff());
    if (res > tol && pfeas > std::max(1e3 * tol, 1e-6)) {
        rep.status = SolveStatus::infeasible;
        rep.x = Vector::Zero(n);
        return rep;
    }
    rep.x = x.cwiseMax(0.0);
    rep.objective = objective_value(p.Q, p.b, rep.x);
    rep.status = res <= tol ? SolveStatus::converged : SolveStatus::max_iter;
    rep.active_set = zero_active_set(rep.x);
    Vector rowval = p.A_mat * rep.x;
    for (Eigen::Index j = 0; j < m; ++j)
        if (std::abs(rowval(j) - p.c_vec(j)) <= 1e-9 * (1.0 + std::abs(p.c_vec(j))))
            rep.active_set.push_back(static_cast<int>(n + j));
    return rep;
}

}  // namespace detail

inline SolveReport solve_qp(const QpProblem& p, double tol = 1e-9, int max_iter = 100000) {
    if (p.Q.rows() != p.Q.cols() || p.Q.rows() != p.b.size())
        throw std::invalid_argument("inconsistent QP dimensions");
    if (tol <= 0) throw std::invalid_argument("tol must be positive");
    switch (p.constraint) {
        case ConstraintKind::nonneg:
            return detail::solve_nonneg(p.Q, p.b, tol, max_iter);
        case ConstraintKind::simplex:
            return detail::solve_simplex(p.Q, p.b, tol, max_iter);
        case ConstraintKind::linear_ineq:
            return detail::solve_linear_ineq(p, tol, max_iter);
    }
    throw std::logic_error("unknown constraint kind");
}

// Murty least-index principal pivoting for the LCP
//   x >= 0, w = Mx - q >= 0, x^T w = 0, with M symmetric positive definite.
inline SolveReport solve_lcp(const Matrix& M_in, const Vector& q, double tol = 1e-9) {
    SolveReport rep;
    Matrix M = guard_spd(M_in, rep.tikhonov_shift);
    const Eigen::Index n = M.rows();
    if (q.size() != n) throw std::invalid_argument("inconsistent LCP dimensions");
    const double pivot_tol = 1e-12 * std::max(1.0, q.lpNorm<Eigen::Infinity>());
    std::vector<char> in_f(static_cast<std::size_t>(n), 0);
    Vector x = Vector::Zero(n);
    const int max_pivots = n < 22 ? (1 << std::min<int>(static_cast<int>(n) + 4, 26))
                                  : 1000000;
    int pivots = 0;
    for (; pivots < max_pivots; ++pivots) {
        std::vector<int> F;
        for (Eigen::Index i = 0; i < n; ++i)
            if (in_f[static_cast<std::size_t>(i)]) F.push_back(static_cast<int>(i));
        x.setZero();
        if (!F.empty()) {
            Vector xf = submatrix(M, F, F).llt().solve(subvector(q, F));
            x = scatter(xf, F, n);
        }
        Vector w = M * x - q;
        int violator = -1;
        for (Eigen::Index i = 0; i < n; ++i) {
            bool bad = in_f[static_cast<std::size_t>(i)] ? x(i) < -pivot_tol
                                                         : w(i) < -pivot_tol;
            if (bad) { violator = static_cast<int>(i); break; }
        }
        if (violator < 0) break;
        in_f[static_cast<std::size_t>(violator)] ^= 1;
    }
    Vector w = M_in * x - q;
    rep.x = x.cwiseMax(0.0);
    rep.iterations = pivots;
    rep.objective = 0.5 * rep.x.dot(M_in * rep.x) - q.dot(rep.x);
    double res = std::max(0.0, -x.minCoeff());
    res = std::max(res, std::max(0.0, -w.minCoeff()));
    res = std::max(res, std::abs(x.dot(w)) / (1.0 + x.lpNorm<Eigen::Infinity>()));
    rep.kkt_residual = res;
    rep.status = (pivots < max_pivots && res <= tol) ? SolveStatus::converged
                                                     : SolveStatus::max_iter;
    rep.active_set = detail::zero_active_set(rep.x);
    return rep;
}

// Dense two-phase simplex with Bland's rule for
//   min c^T x  s.t.  A x >= b, x >= 0,  max(n, m) <= 200.
inline SolveReport solve_lp(const Vector& c, const Matrix& A, const Vector& b) {
    const Eigen::Index n = c.size();
    const Eigen::Index m = A.rows();
    if (A.cols() != n || b.size() != m) throw std::invalid_argument("inconsistent LP dimensions");
    if (n > 200 || m > 200) throw std::invalid_argument("LP instance size exceeds 200");
    SolveReport rep;

    // Standard form: [A | -I] [x; s] = b, then row-negate to make rhs >= 0,
    // then append artificial columns forming the phase-1 identity basis.
    const Eigen::Index nv = n + m;
    Matrix T(m, nv + m);
    Vector rhs = b;
    T.leftCols(n) = A;
    T.middleCols(n, m) = -Matrix::Identity(m, m);
    T.rightCols(m).setZero();
    for (Eigen::Index i = 0; i < m; ++i) {
        if (rhs(i) < 0) {
            T.row(i).head(nv) *= -1.0;
            rhs(i) *= -1.0;
        }
        T(i, nv + i) = 1.0;
    }
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = nv + i;

    const double piv_tol = 1e-11;
    int pivots = 0;
    const int max_pivots = 50000;

    auto pivot = [&](Eigen::Index row, Eigen::Index col, Eigen::RowVectorXd& z, double& zval) {
        double p = T(row, col);
        T.row(row) /= p;
        rhs(row) /= p;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (i == row) continue;
            double f = T(i, col);
            if (f != 0.0) {
                T.row(i) -= f * T.row(row);
                rhs(i) -= f * rhs(row);
            }
        }
        double fz = z(col);
        if (fz != 0.0) {
            z -= fz * T.row(row);
            zval -= fz * rhs(row);
        }
        basis[static_cast<std::size_t>(row)] = col;
        ++pivots;
    };

    // Runs simplex iterations on reduced-cost row z over admissible columns.
    auto run = [&](Eigen::RowVectorXd& z, double& zval, Eigen::Index col_limit) -> SolveStatus {
        while (pivots < max_pivots) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < col_limit; ++j)
                if (z(j) < -1e-9) { enter = j; break; }  // Bland: least index
            if (enter < 0) return SolveStatus::converged;
            Eigen::Index leave = -1;
            double best_ratio = 0.0;
            for (Eigen::Index i = 0; i < m; ++i) {
                if (T(i, enter) > piv_tol) {
                    double ratio = rhs(i) / T(i, enter);
                    if (leave < 0 || ratio < best_ratio - 1e-12 ||
                        (ratio < best_ratio + 1e-12 &&
                         basis[static_cast<std::size_t>(i)] <
                             basis[static_cast<std::size_t>(leave)])) {
                        leave = i;
                        best_ratio = ratio;
                    }
                }
            }
            if (leave < 0) return SolveStatus::unbounded;
            pivot(leave, enter, z, zval);
        }
        return SolveStatus::max_iter;
    };

    // Phase 1: minimize the artificial sum.
    Eigen::RowVectorXd z1 = Eigen::RowVectorXd::Zero(nv + m);
    z1.tail(m).setOnes();
    double z1val = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        z1 -= T.row(i);
        z1val -= rhs(i);
    }
    SolveStatus st1 = run(z1, z1val, nv + m);
    rep.iterations = pivots;
    if (st1 == SolveStatus::max_iter) { rep.status = SolveStatus::max_iter; return rep; }
    if (-z1val > 1e-7 * (1.0 + b.lpNorm<Eigen::Infinity>())) {
        rep.status = SolveStatus::infeasible;
        rep.x = Vector::Zero(n);
        return rep;
    }
    // Drive any artificial still basic out of the basis (or ignore its
    // redundant zero row).
    for (Eigen::Index i = 0; i < m; ++i) {
        if (basis[static_cast<std::size_t>(i)] >= nv) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < nv; ++j)
                if (std::abs(T(i, j)) > piv_tol) { enter = j; break; }
            if (enter >= 0) pivot(i, enter, z1, z1val);
        }
    }

    // Phase 2 over the true costs, artificial columns excluded.
    Eigen::RowVectorXd z2 = Eigen::RowVectorXd::Zero(nv + m);
    z2.head(n) = c.transpose();
    double z2val = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        Eigen::Index bi = basis[static_cast<std::size_t>(i)];
        double cb = bi < n ? c(bi) : 0.0;
        if (cb != 0.0) {
            z2 -= cb * T.row(i);
            z2val -= cb * rhs(i);
        }
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        Eigen::Index bi = basis[static_cast<std::size_t>(i)];
        if (bi < nv + m) z2(bi) = 0.0;  // clean roundoff on basic columns
    }
    SolveStatus st2 = run(z2, z2val, nv);
    rep.iterations = pivots;
    if (st2 != SolveStatus::converged) { rep.status = st2; return rep; }

    Vector x = Vector::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        Eigen::Index bi = basis[static_cast<std::size_t>(i)];
        if (bi < n) x(bi) = rhs(i);
    }
    x = x.cwiseMax(0.0);
    rep.x = x;
    rep.objective = c.dot(x);
    Vector slack = A * x - b;
    rep.kkt_residual = std::max(0.0, -slack.minCoeff());
    rep.status = SolveStatus::converged;
    rep.active_set = detail::zero_active_set(x);
    for (Eigen::Index j = 0; j < m; ++j)
        if (std::abs(slack(j)) <= 1e-9 * (1.0 + std::abs(b(j))))
            rep.active_set.push_back(static_cast<int>(n + j));
    return rep;
}

// Exhaustive active-set enumeration: solves every equality-constrained KKT
// system, keeps the best sign-correct feasible candidate. Exact reference for
// solve_qp; dimension capped at 12.
inline SolveReport brute_force_oracle(const QpProblem& p) {
    const Eigen::Index n = p.Q.rows();
    if (n > 12) throw std::invalid_argument("brute_force_oracle limited to dimension 12");
    if (p.Q.rows() != p.Q.cols() || p.b.size() != n)
        throw std::invalid_argument("inconsistent QP dimensions");
    const double feas_tol = 1e-10;
    SolveReport best;
    best.status = SolveStatus::infeasible;
    double best_obj = std::numeric_limits<double>::infinity();
    auto consider = [&](const Vector& x, const std::vector<int>& act) {
        double obj = detail::objective_value(p.Q, p.b, x);
        if (obj < best_obj - 1e-15) {
            best_obj = obj;
            best.x = x;
            best.objective = obj;
            best.active_set = act;
            best.status = SolveStatus::converged;
        }
    };

    if (p.constraint == ConstraintKind::nonneg || p.constraint == ConstraintKind::simplex) {
        const bool simplex = p.constraint == ConstraintKind::simplex;
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            std::vector<int> F;
            for (Eigen::Index i = 0; i < n; ++i)
                if (mask & (1u << i)) F.push_back(static_cast<int>(i));
            if (simplex && F.empty()) continue;
            const Eigen::Index f = static_cast<Eigen::Index>(F.size());
            Vector x = Vector::Zero(n);
            double lambda = 0.0;
            if (simplex) {
                Matrix Kkt = Matrix::Zero(f + 1, f + 1);
                Kkt.topLeftCorner(f, f) = submatrix(p.Q, F, F);
                Kkt.topRightCorner(f, 1).setConstant(-1.0);
                Kkt.bottomLeftCorner(1, f).setOnes();
                Vector rhs(f + 1);
                rhs.head(f) = subvector(p.b, F);
                rhs(f) = 1.0;
                Vector sol = Kkt.partialPivLu().solve(rhs);
                if ((Kkt * sol - rhs).lpNorm<Eigen::Infinity>() >
                    1e-8 * (1.0 + rhs.lpNorm<Eigen::Infinity>()))
                    continue;
                x = scatter(sol.head(f), F, n);
                lambda = sol(f);
            } else if (!F.empty()) {
                Matrix Qff = submatrix(p.Q, F, F);
                Vector rhsf = subvector(p.b, F);
                Vector sol = Qff.partialPivLu().solve(rhsf);
                if ((Qff * sol - rhsf).lpNorm<Eigen::Infinity>() >
                    1e-8 * (1.0 + rhsf.lpNorm<Eigen::Infinity>()))
                    continue;
                x = scatter(sol, F, n);
            }
            if (x.minCoeff() < -feas_tol) continue;
            Vector g = p.Q * x - p.b;
            bool stationary = true;
            for (Eigen::Index i = 0; i < n && stationary; ++i)
                if (!(mask & (1u << i)) && g(i) - lambda < -feas_tol) stationary = false;
            if (!stationary) continue;
            std::vector<int> act;
            for (Eigen::Index i = 0; i < n; ++i)
                if (!(mask & (1u << i))) act.push_back(static_cast<int>(i));
            consider(x.cwiseMax(0.0), act);
        }
        return best;
    }

    // linear_ineq: free-variable sets crossed with active-row sets.
    const Eigen::Index m = p.A_mat.rows();
    if (n + m > 24) throw std::invalid_argument("brute_force_oracle linear_ineq size too large");
    for (std::uint32_t fmask = 0; fmask < (1u << n); ++fmask) {
        std::vector<int> F;
        for (Eigen::Index i = 0; i < n; ++i)
            if (fmask & (1u << i)) F.push_back(static_cast<int>(i));
        const Eigen::Index f = static_cast<Eigen::Index>(F.size());
        for (std::uint32_t wmask = 0; wmask < (1u << m); ++wmask) {
            std::vector<int> W;
            for (Eigen::Index j = 0; j < m; ++j)
                if (wmask & (1u << j)) W.push_back(static_cast<int>(j));
            const Eigen::Index w = static_cast<Eigen::Index>(W.size());
            if (w > f) continue;  // more equalities than freedoms: generically singular
            Matrix Kkt = Matrix::Zero(f + w, f + w);
            Vector rhs(f + w);
            if (f > 0) {
                Kkt.topLeftCorner(f, f) = submatrix(p.Q, F, F);
                rhs.head(f) = subvector(p.b, F);
            }
            std::vector<int> all_cols = F;
            if (w > 0) {
                Matrix Awf(w, f);
                for (Eigen::Index a = 0; a < w; ++a)
                    for (Eigen::Index k = 0; k < f; ++k)
                        Awf(a, k) = p.A_mat(W[static_cast<std::size_t>(a)],
                                            F[static_cast<std::size_t>(k)]);
                Kkt.topRightCorner(f, w) = -Awf.transpose();
                Kkt.bottomLeftCorner(w, f) = Awf;
                for (Eigen::Index a = 0; a < w; ++a)
                    rhs(f + a) = p.c_vec(W[static_cast<std::size_t>(a)]);
            }
            if (f + w == 0) {
                Vector x = Vector::Zero(n);
                if (m > 0 && (p.c_vec - p.A_mat * x).maxCoeff() > feas_tol) continue;
                Vector g = p.Q * x - p.b;
                if (g.minCoeff() < -feas_tol) continue;
                consider(x, {});
                continue;
            }
            Vector sol = Kkt.partialPivLu().solve(rhs);
            if ((Kkt * sol - rhs).lpNorm<Eigen::Infinity>() >
                1e-8 * (1.0 + rhs.lpNorm<Eigen::Infinity>()))
                continue;
            Vector x = scatter(sol.head(f), F, n);
            Vector y = Vector::Zero(m);
            for (Eigen::Index a = 0; a < w; ++a) y(W[static_cast<std::size_t>(a)]) = sol(f + a);
            if (x.minCoeff() < -feas_tol) continue;
            if (w > 0 && y.minCoeff() < -feas_tol) continue;
            if (m > 0 && (p.c_vec - p.A_mat * x).maxCoeff() > feas_tol) continue;
            Vector g = p.Q * x - p.b - p.A_mat.transpose() * y;
            bool stationary = true;
            for (Eigen::Index i = 0; i < n && stationary; ++i)
                if (!(fmask & (1u << i)) && g(i) < -feas_tol) stationary = false;
            if (!stationary) continue;
            std::vector<int> act;
            for (Eigen::Index i = 0; i < n; ++i)
                if (!(fmask & (1u << i))) act.push_back(static_cast<int>(i));
            for (Eigen::Index j = 0; j < m; ++j)
                if (wmask & (1u << j)) act.push_back(static_cast<int>(n + j));
            consider(x.cwiseMax(0.0), act);
        }
    }
    return best;
}

// Exhaustive vertex enumeration for min c^T x s.t. Ax >= b, x >= 0.
// Valid when the optimum is attained at a vertex (bounded feasible region, or
// c >= 0 which bounds the objective on the orthant). Reference for solve_lp.
inline SolveReport brute_force_lp(const Vector& c, const Matrix& A, const Vector& b) {
    const Eigen::Index n = c.size();
    const Eigen::Index m = A.rows();
    if (n > 12 || m > 12) throw std::invalid_argument("brute_force_lp limited to size 12");
    const double feas_tol = 1e-9;
    SolveReport best;
    best.status = SolveStatus::infeasible;
    double best_obj = std::numeric_limits<double>::infinity();
    const Eigen::Index total = n + m;  // constraints: x_i = 0 (i < n), row j (n + j)
    std::vector<int> comb(static_cast<std::size_t>(n));
    // enumerate all n-subsets of the n + m constraint indices
    for (Eigen::Index i = 0; i < n; ++i) comb[static_cast<std::size_t>(i)] = static_cast<int>(i);
    while (true) {
        Matrix S(n, n);
        Vector rhs(n);
        for (Eigen::Index r = 0; r < n; ++r) {
            int idx = comb[static_cast<std::size_t>(r)];
            if (idx < n) {
                S.row(r).setZero();
                S(r, idx) = 1.0;
                rhs(r) = 0.0;
            } else {
                S.row(r) = A.row(idx - n);
                rhs(r) = b(idx - n);
            }
        }
        Vector x = S.partialPivLu().solve(rhs);
        if ((S * x - rhs).lpNorm<Eigen::Infinity>() <= 1e-8 * (1.0 + rhs.lpNorm<Eigen::Infinity>()) &&
            x.minCoeff() >= -feas_tol &&
            (m == 0 || (A * x - b).minCoeff() >= -feas_tol)) {
            double obj = c.dot(x);
            if (obj < best_obj - 1e-15) {
                best_obj = obj;
                best.x = x.cwiseMax(0.0);
                best.objective = obj;
                best.status = SolveStatus::converged;
            }
        }
        // next combination
        Eigen::Index k = n - 1;
        while (k >= 0 && comb[static_cast<std::size_t>(k)] ==
                             static_cast<int>(total - n + k))
            --k;
        if (k < 0) break;
        ++comb[static_cast<std::size_t>(k)];
        for (Eigen::Index j = k + 1; j < n; ++j)
            comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
    return best;
}

}  // namespace capax
