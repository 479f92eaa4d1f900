#pragma once
// Submatrix and subvector extraction by index lists, shared by the solvers
// and the potential-theory modules.

#include <Eigen/Dense>
#include <vector>

namespace capax {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix submatrix(const Matrix& M, const std::vector<int>& rows,
                        const std::vector<int>& cols) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = M(rows[i], cols[j]);
    return out;
}

inline Vector subvector(const Vector& v, const std::vector<int>& idx) {
    Vector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
    return out;
}

// Scatter sub-entries back: out[idx[i]] = v[i], zeros elsewhere.
inline Vector scatter(const Vector& v, const std::vector<int>& idx, Eigen::Index n) {
    Vector out = Vector::Zero(n);
    for (std::size_t i = 0; i < idx.size(); ++i) out(idx[i]) = v(static_cast<Eigen::Index>(i));
    return out;
}

}  // namespace capax
