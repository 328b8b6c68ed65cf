#pragma once

// Gaussian elimination over an exact field. Every routine here is templated on
// the scalar so the same code serves Rational matrices and any other exact
// field type; none of it is meant for floating point.

#include "toricflow/scalar.hpp"

#include <optional>
#include <utility>

namespace toricflow {

template <typename Scalar>
struct Echelon {
    Matrix<Scalar> reduced;               // reduced row echelon form
    std::vector<Eigen::Index> pivots;     // pivot column of each nonzero row
};

template <typename Derived>
Echelon<typename Derived::Scalar> rref(const Eigen::MatrixBase<Derived>& input) {
    using Scalar = typename Derived::Scalar;
    Matrix<Scalar> a = input;
    std::vector<Eigen::Index> pivots;
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < a.cols() && row < a.rows(); ++col) {
        Eigen::Index sel = -1;
        for (Eigen::Index r = row; r < a.rows(); ++r)
            if (a(r, col) != 0) { sel = r; break; }
        if (sel < 0) continue;
        if (sel != row) a.row(sel).swap(a.row(row));
        const Scalar inv = Scalar(1) / a(row, col);
        for (Eigen::Index j = col; j < a.cols(); ++j) a(row, j) *= inv;
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            if (r == row || a(r, col) == 0) continue;
            const Scalar f = a(r, col);
            for (Eigen::Index j = col; j < a.cols(); ++j) a(r, j) -= f * a(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return {std::move(a), std::move(pivots)};
}

template <typename Derived>
Eigen::Index rank(const Eigen::MatrixBase<Derived>& a) {
    return static_cast<Eigen::Index>(rref(a).pivots.size());
}

/// Columns form a basis of {x : a x = 0}.
template <typename Derived>
Matrix<typename Derived::Scalar> nullspace(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    const auto e = rref(a);
    const Eigen::Index n = a.cols();
    std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
    for (auto p : e.pivots) is_pivot[static_cast<std::size_t>(p)] = true;
    Matrix<Scalar> basis(n, n - static_cast<Eigen::Index>(e.pivots.size()));
    Eigen::Index k = 0;
    for (Eigen::Index free = 0; free < n; ++free) {
        if (is_pivot[static_cast<std::size_t>(free)]) continue;
        basis.col(k).setZero();
        basis(free, k) = Scalar(1);
        for (std::size_t r = 0; r < e.pivots.size(); ++r)
            basis(e.pivots[r], k) = -e.reduced(static_cast<Eigen::Index>(r), free);
        ++k;
    }
    return basis;
}

/// Some solution of a x = b, or nullopt when the system is inconsistent.
template <typename DA, typename DB>
std::optional<Vector<typename DA::Scalar>> solve(const Eigen::MatrixBase<DA>& a,
                                                 const Eigen::MatrixBase<DB>& b) {
    using Scalar = typename DA::Scalar;
    Matrix<Scalar> aug(a.rows(), a.cols() + 1);
    aug.leftCols(a.cols()) = a;
    aug.col(a.cols()) = b;
    const auto e = rref(aug);
    Vector<Scalar> x = Vector<Scalar>::Zero(a.cols());
    for (std::size_t r = 0; r < e.pivots.size(); ++r) {
        const auto p = e.pivots[r];
        if (p == a.cols()) return std::nullopt;
        x(p) = e.reduced(static_cast<Eigen::Index>(r), a.cols());
    }
    return x;
}

template <typename Derived>
typename Derived::Scalar determinant(const Eigen::MatrixBase<Derived>& input) {
    using Scalar = typename Derived::Scalar;
    if (input.rows() != input.cols()) throw std::invalid_argument("determinant: matrix not square");
    Matrix<Scalar> a = input;
    Scalar det(1);
    const Eigen::Index n = a.rows();
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index sel = -1;
        for (Eigen::Index r = col; r < n; ++r)
            if (a(r, col) != 0) { sel = r; break; }
        if (sel < 0) return Scalar(0);
        if (sel != col) { a.row(sel).swap(a.row(col)); det = -det; }
        det *= a(col, col);
        for (Eigen::Index r = col + 1; r < n; ++r) {
            if (a(r, col) == 0) continue;
            const Scalar f = a(r, col) / a(col, col);
            for (Eigen::Index j = col; j < n; ++j) a(r, j) -= f * a(col, j);
        }
    }
    return det;
}

template <typename Derived>
std::optional<Matrix<typename Derived::Scalar>> inverse(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = a.rows();
    Matrix<Scalar> aug(n, 2 * n);
    aug.leftCols(n) = a;
    aug.rightCols(n) = Matrix<Scalar>::Identity(n, n);
    const auto e = rref(aug);
    if (static_cast<Eigen::Index>(e.pivots.size()) < n || (n > 0 && e.pivots[static_cast<std::size_t>(n - 1)] >= n))
        return std::nullopt;
    return Matrix<Scalar>(e.reduced.rightCols(n));
}

/// Stacks the rows of a and b (same column count).
template <typename DA, typename DB>
Matrix<typename DA::Scalar> vstack(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    Matrix<typename DA::Scalar> out(a.rows() + b.rows(), a.cols());
    if (a.rows() > 0) out.topRows(a.rows()) = a;
    if (b.rows() > 0) out.bottomRows(b.rows()) = b;
    return out;
}

/// Rows of m selected by idx, in order.
template <typename Derived>
Matrix<typename Derived::Scalar> select_rows(const Eigen::MatrixBase<Derived>& m, const IndexSet& idx) {
    Matrix<typename Derived::Scalar> out(static_cast<Eigen::Index>(idx.size()), m.cols());
    for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = m.row(static_cast<Eigen::Index>(idx[k]));
    return out;
}

}  // namespace toricflow
