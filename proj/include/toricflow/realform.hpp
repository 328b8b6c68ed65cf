#pragma once

// Small-cover gluing of 2^m sign-labelled copies of a slice polytope, mod-2
// homology, orientability and surface names for the resulting complex.

#include "toricflow/lattice.hpp"
#include "toricflow/polytope.hpp"

#include <cstdint>
#include <optional>

namespace toricflow {

class SingularSlice : public std::runtime_error {
public:
    explicit SingularSlice(const std::string& what) : std::runtime_error(what) {}
};

class UnboundedSlice : public std::runtime_error {
public:
    explicit UnboundedSlice(const std::string& what) : std::runtime_error(what) {}
};

/// Bit k set means ε_k = −1.
using SignMask = std::uint32_t;

std::vector<int> sign_vector(SignMask mask, Eigen::Index m);  // ±1 entries

struct Cell {
    std::size_t face = 0;  // index into GluedComplex::faces
    SignMask coset = 0;    // smallest element of ε·H_G
};

struct GluedComplex {
    Eigen::Index m = 0;
    Eigen::Index dim = 0;
    std::vector<SliceFace> faces;
    std::vector<SignMask> sigma;                         // per facet of Δ̄
    std::vector<std::vector<Cell>> cells;                // by dimension 0..dim
    std::vector<std::vector<std::vector<std::size_t>>> boundary;  // boundary[k][cell]: (k−1)-cells
    bool open = false;                                   // cells over removed faces were deleted

    std::size_t count(Eigen::Index k) const { return cells[static_cast<std::size_t>(k)].size(); }
};

/// (σ_i)_k = (−1)^{(λ_i)_k}
SignMask facet_sign(const IntVector& lambda);

/// Subgroup of {±1}^m generated by the masks, as sorted elements.
std::vector<SignMask> subgroup(const std::vector<SignMask>& generators);

/**
 * Throws SingularSlice when the slice meets a ζ-singular face, UnboundedSlice
 * when it is unbounded, std::invalid_argument when it is empty.
 */
GluedComplex glue(const SlicePolyhedron& s);

struct TopologyReport {
    Eigen::Index dim = 0;
    std::size_t components = 0;
    long euler = 0;
    std::vector<std::size_t> betti_mod2;
    std::optional<bool> orientable;  // absent when undetermined
    bool closed = true;
    std::string surface;             // "S2", "T2", "Sigma_3", "RP2", "Klein", "#4 RP2", "S1", "pt"; joined by " + "
};

TopologyReport topology(const GluedComplex& g);

struct TotalSpace {
    std::string description;     // "S2 x S1"
    std::string quotient_model;  // "(S2 x S1)/K, |K| = 2"
    std::uint64_t k_order = 1;
    bool special = true;
};

/// L = M × T^n. Non-special ζ falls back to "M x U" with U a ball in V_ζ.
TotalSpace total_space(const TopologyReport& report, const SpecialConditionReport& special);

}  // namespace toricflow
