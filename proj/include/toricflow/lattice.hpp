#pragma once

// Integer-lattice algorithms: Hermite normal form, saturation of the row
// lattice of a set of integer vectors, and the special condition together with
// the order of the two-torsion group K_zeta.

#include "toricflow/scalar.hpp"

#include <cstdint>

namespace toricflow {

class DependentRows : public std::runtime_error {
public:
    explicit DependentRows(const std::string& what) : std::runtime_error(what) {}
};

struct HermiteForm {
    IntMatrix h;  // row-style HNF, h = u * a
    IntMatrix u;  // unimodular
};

/**
 * Row-style Hermite normal form. Nonzero rows come first, each pivot (leading
 * entry) is positive and strictly right of the pivot above it, and every entry
 * above a pivot lies in [0, pivot). Zero input yields zero h.
 */
HermiteForm hnf(const IntMatrix& a);

/// gcd of the entries equals 1.
bool is_primitive(const IntVector& v);
bool is_primitive(const Eigen::Ref<const IntMatrix>& row);

struct LatticeBasis {
    IntMatrix vectors;  // one basis vector per row
    Eigen::Index rank = 0;
};

/**
 * Z-basis of V ∩ Z^m where V is the real span of the rows of zeta. The basis
 * is returned in HNF so identical lattices give identical output.
 * Throws DependentRows when the rows are linearly dependent over Q.
 */
LatticeBasis saturation_basis(const IntMatrix& zeta);

/// [Z basis : Z zeta] for rows of zeta lying in the span of basis.
Integer lattice_index(const IntMatrix& zeta, const LatticeBasis& basis);

struct SpecialConditionReport {
    bool is_special = false;
    LatticeBasis saturation;         // empty unless is_special
    IntMatrix integer_rows;          // zeta with denominators cleared row by row
    Integer index = 1;               // [V ∩ Z^m : Z zeta_1 + ... + Z zeta_n]
    std::uint64_t k_zeta_order = 1;  // |(V ∩ ½Z^m) / (V ∩ Z^m)|
};

/// Multiplies each row by the lcm of its denominators.
IntMatrix clear_denominators(const RatMatrix& zeta);

/**
 * Decides the special condition for rational zeta. The order of K_zeta is
 * counted by enumerating half-lattice classes of the saturation basis.
 * Throws DependentRows.
 */
SpecialConditionReport special_condition(const RatMatrix& zeta);

}  // namespace toricflow
