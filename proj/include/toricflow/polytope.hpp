#pragma once

// Exact moment-polytope data: Δ̄ = ∩ {y : <y, λ_i> >= κ_i}, its face lattice,
// the Calabi–Yau vector, ζ-singular strata and slices Δ ∩ {<y, ζ_i> = c_i}.
//
// Facet indices are 0-based in the API and 1-based in every report.

#include "toricflow/scalar.hpp"

#include <memory>
#include <mutex>
#include <optional>

namespace toricflow {

class EmptyInterior : public std::runtime_error {
public:
    explicit EmptyInterior(const std::string& what) : std::runtime_error(what) {}
};

class OutsidePolytope : public std::runtime_error {
public:
    explicit OutsidePolytope(const std::string& what) : std::runtime_error(what) {}
};

struct Facet {
    IntVector normal;
    Rational offset;
};

/// A face of Δ̄ identified by its closed active set.
struct FaceDescriptor {
    IndexSet active;          // every i with <y, λ_i> = κ_i on the whole face
    Eigen::Index dim = 0;     // affine dimension (m - rank of the active normals)
    RatVector relint_point;   // a point whose active set is exactly `active`
    bool removed = false;     // listed in the removed-face set G
};

class Polytope {
public:
    Polytope(std::vector<Facet> facets, std::vector<IndexSet> removed_faces = {});

    Eigen::Index dim() const { return data_->m; }
    std::size_t facet_count() const { return data_->facets.size(); }
    const std::vector<Facet>& facets() const { return data_->facets; }
    const IntMatrix& normals() const { return data_->normals; }     // d x m
    const RatMatrix& normals_q() const { return data_->normals_q; } // d x m
    const RatVector& offsets() const { return data_->offsets; }
    const std::vector<IndexSet>& removed_faces() const { return data_->removed; }

    /// All nonempty faces of Δ̄ (memoized; safe to call concurrently).
    const std::vector<FaceDescriptor>& faces() const;

    /// <y, λ_i> - κ_i
    Rational slack(std::size_t facet, const RatVector& y) const;

private:
    struct Data {
        Eigen::Index m = 0;
        std::vector<Facet> facets;
        IntMatrix normals;
        RatMatrix normals_q;
        RatVector offsets;
        std::vector<IndexSet> removed;
        mutable std::once_flag faces_once;
        mutable std::vector<FaceDescriptor> faces;
    };
    std::shared_ptr<const Data> data_;
};

struct ValidationReport {
    bool bounded = false;
    bool simple = true;                      // checked on the vertices of Δ̄
    std::vector<std::size_t> non_primitive;  // facets whose normal has gcd > 1
    std::vector<std::size_t> redundant;      // listed facets that are not supporting facets
    std::vector<std::string> warnings;
};

/// Throws EmptyInterior when Δ̄ has no interior point.
ValidationReport validate(const Polytope& p);

struct CYVector {
    IntVector gamma;
    bool unique = true;
};

/// Integer γ with <γ, λ_i> = 1 for all i; the canonical representative modulo
/// the integer kernel when the solution set is positive dimensional.
std::optional<CYVector> cy_vector(const Polytope& p);

/// Throws OutsidePolytope when some inequality fails.
FaceDescriptor active_set(const Polytope& p, const RatVector& y);

/// V_ζ ∩ Span{λ_i : i ∈ active} == {0}, by exact rank.
bool is_zeta_regular(const Polytope& p, const RatMatrix& zeta, const IndexSet& active);

struct RegularityResult {
    bool regular = true;
    IntVector witness;  // primitive nonzero vector in V_ζ ∩ z_y when singular
};

RegularityResult zeta_regular(const Polytope& p, const RatMatrix& zeta, const RatVector& y);
RegularityResult zeta_regular_active(const Polytope& p, const RatMatrix& zeta, const IndexSet& active);

struct SliceFace {
    std::vector<std::size_t> vertices;  // indices into SlicePolyhedron::vertices
    IndexSet facets;                    // facets of Δ̄ containing the face
    Eigen::Index dim = 0;
};

struct SlicePolyhedron {
    Polytope base;
    RatMatrix zeta;
    RatVector c;
    bool feasible = false;
    bool meets_interior = false;
    bool bounded = false;
    IndexSet touched_facets;                // facets F_i with F_i ∩ slice nonempty
    std::vector<RatVector> vertices;        // exact, only when bounded (sorted)
    std::vector<IndexSet> vertex_facets;    // facets tight at each vertex
    Eigen::Index dim = -1;                  // affine dimension, -1 when empty
};

/// Throws DependentRows.
SlicePolyhedron slice(const Polytope& p, const RatMatrix& zeta, const RatVector& c);

/// Face lattice of a bounded feasible slice, computed from its vertices.
std::vector<SliceFace> slice_faces(const SlicePolyhedron& s);

struct SliceRegularity {
    bool regular = true;
    std::optional<FaceDescriptor> witness_face;  // a ζ-singular face met by the slice
    RatVector witness_point;                     // a slice point in the relative interior of that face
};

SliceRegularity slice_regularity(const SlicePolyhedron& s);

/// Relative-interior point of (face with active set A) ∩ {ζ y = c}, if any.
std::optional<RatVector> face_slice_point(const Polytope& p, const IndexSet& active, const RatMatrix& zeta,
                                          const RatVector& c);

std::string describe_indices(const IndexSet& s);  // "[1,3,4]" (1-based)

}  // namespace toricflow
