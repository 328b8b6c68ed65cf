#pragma once

// Brute-force oracles shared by the unit tests and the acceptance suite.

#include "toricflow/exact_linalg.hpp"
#include "toricflow/lattice.hpp"
#include "toricflow/polytope.hpp"

#include <functional>
#include <numeric>

namespace oracles {

using namespace toricflow;

/// Cells by dimension from 0: all 2^m copies of every slice face, identified by
/// union-find along ε ~ ε σ_i for each facet i containing the face.
inline std::vector<std::size_t> glued_cell_counts(const SlicePolyhedron& s) {
    const auto faces = slice_faces(s);
    const Eigen::Index m = s.base.dim();
    const std::size_t copies = std::size_t{1} << m;
    std::vector<std::size_t> parent(faces.size() * copies);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (std::size_t f = 0; f < faces.size(); ++f)
        for (std::size_t e = 0; e < copies; ++e)
            for (auto i : faces[f].facets) {
                std::size_t flipped = e;
                for (Eigen::Index k = 0; k < m; ++k)
                    if (s.base.normals()(static_cast<Eigen::Index>(i), k) % 2 != 0) flipped ^= std::size_t{1} << k;
                parent[find(f * copies + e)] = find(f * copies + flipped);
            }
    Eigen::Index dim = 0;
    for (const auto& f : faces) dim = std::max(dim, f.dim);
    std::vector<std::size_t> counts(static_cast<std::size_t>(dim) + 1, 0);
    for (std::size_t x = 0; x < parent.size(); ++x)
        if (find(x) == x) ++counts[static_cast<std::size_t>(faces[x / copies].dim)];
    return counts;
}

/// True when the rows of `basis` are integer points of V = rowspan(zeta), have
/// full rank, and every integer point of V with sup norm <= bound is an integer
/// combination of them.
inline bool saturation_matches_box(const IntMatrix& zeta, const IntMatrix& basis, int bound) {
    const Eigen::Index n = zeta.rows(), m = zeta.cols();
    const RatMatrix b = to_rational(basis);
    if (basis.rows() != n || rank(b) != n) return false;
    if (rank(vstack(to_rational(zeta), b)) != n) return false;

    const RatMatrix w = nullspace(to_rational(zeta)).transpose();  // (m − n) x m, W v = 0 iff v ∈ V
    const RatMatrix p = b.transpose() * *inverse(RatMatrix(b * b.transpose()));
    IntVector v = IntVector::Constant(m, Integer(-bound));
    while (true) {
        const RatVector q = to_rational(v);
        if ((w * q).isZero()) {
            const RatVector coeff = p.transpose() * q;
            for (Eigen::Index k = 0; k < n; ++k)
                if (!is_integral(coeff(k))) return false;
            if (RatVector(b.transpose() * coeff) != q) return false;
        }
        Eigen::Index k = 0;
        while (k < m && v(k) == bound) v(k++) = -bound;
        if (k == m) break;
        v(k) += 1;
    }
    return true;
}

}  // namespace oracles
