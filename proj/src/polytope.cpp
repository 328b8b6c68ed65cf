#include "toricflow/polytope.hpp"

#include "toricflow/exact_linalg.hpp"
#include "toricflow/lattice.hpp"
#include "toricflow/lp.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace toricflow {

namespace {

RatVector unit(Eigen::Index size, Eigen::Index k) {
    RatVector e = RatVector::Zero(size);
    e(k) = 1;
    return e;
}

bool contains(const IndexSet& s, std::size_t i) { return std::binary_search(s.begin(), s.end(), i); }

/**
 * max s subject to  <y, λ_i> = κ_i (i in A),  <y, λ_j> - s >= κ_j (j not in A),
 * eq y = eq_rhs,  s <= 1.  Returns y when s* > 0, i.e. when the face with
 * closed active set A meets the affine subspace in its relative interior.
 */
std::optional<RatVector> relint_point(const Polytope& p, const IndexSet& active, const RatMatrix& eq,
                                      const RatVector& eq_rhs, bool* feasible = nullptr) {
    const Eigen::Index m = p.dim();
    LinearProgram lp(m + 1);
    for (std::size_t i = 0; i < p.facet_count(); ++i) {
        RatVector row = RatVector::Zero(m + 1);
        row.head(m) = p.normals_q().row(static_cast<Eigen::Index>(i)).transpose();
        if (contains(active, i)) {
            lp.add_eq(row, p.offsets()(static_cast<Eigen::Index>(i)));
        } else {
            row(m) = -1;
            lp.add_ge(row, p.offsets()(static_cast<Eigen::Index>(i)));
        }
    }
    for (Eigen::Index r = 0; r < eq.rows(); ++r) {
        RatVector row = RatVector::Zero(m + 1);
        row.head(m) = eq.row(r).transpose();
        lp.add_eq(row, eq_rhs(r));
    }
    lp.add_le(unit(m + 1, m), Rational(1));
    lp.objective = unit(m + 1, m);
    const LpResult r = maximize(lp);
    if (feasible) *feasible = r.status != LpStatus::Infeasible;
    if (r.status != LpStatus::Optimal || r.value <= 0) return std::nullopt;
    return RatVector(r.x.head(m));
}

LinearProgram closed_feasibility(const Polytope& p, const IndexSet& tight, const RatMatrix& eq, const RatVector& eq_rhs) {
    const Eigen::Index m = p.dim();
    LinearProgram lp(m);
    for (std::size_t i = 0; i < p.facet_count(); ++i) {
        const RatVector row = p.normals_q().row(static_cast<Eigen::Index>(i)).transpose();
        if (contains(tight, i)) lp.add_eq(row, p.offsets()(static_cast<Eigen::Index>(i)));
        else lp.add_ge(row, p.offsets()(static_cast<Eigen::Index>(i)));
    }
    for (Eigen::Index r = 0; r < eq.rows(); ++r) lp.add_eq(eq.row(r).transpose(), eq_rhs(r));
    return lp;
}

// Recession cone {d : ζ d = 0, Λ d >= 0} is {0}.
bool section_bounded(const Polytope& p, const RatMatrix& zeta) {
    const Eigen::Index m = p.dim();
    LinearProgram lp(m);
    RatVector total = RatVector::Zero(m);
    for (std::size_t i = 0; i < p.facet_count(); ++i) {
        const RatVector row = p.normals_q().row(static_cast<Eigen::Index>(i)).transpose();
        lp.add_ge(row, Rational(0));
        total += row;
    }
    for (Eigen::Index r = 0; r < zeta.rows(); ++r) lp.add_eq(zeta.row(r).transpose(), Rational(0));
    lp.add_le(total, Rational(1));
    lp.objective = total;
    const LpResult r = maximize(lp);
    if (r.status == LpStatus::Optimal && r.value > 0) return false;
    return rank(vstack(zeta, p.normals_q())) == m;
}

IntVector primitive_integer(const RatVector& v) {
    Integer l(1);
    for (Eigen::Index j = 0; j < v.size(); ++j) l = lcm(l, boost::multiprecision::denominator(v(j)));
    IntVector z(v.size());
    Integer g(0);
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        z(j) = boost::multiprecision::numerator(v(j) * Rational(l));
        g = gcd(g, abs(z(j)));
    }
    if (g > 1)
        for (Eigen::Index j = 0; j < v.size(); ++j) z(j) /= g;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        if (z(j) == 0) continue;
        if (z(j) < 0) z = -z;
        break;
    }
    return z;
}

bool lex_less(const RatVector& a, const RatVector& b) {
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        if (a(j) < b(j)) return true;
        if (b(j) < a(j)) return false;
    }
    return false;
}

Eigen::Index affine_dim(const std::vector<RatVector>& pts, const std::vector<std::size_t>& idx) {
    if (idx.empty()) return -1;
    const Eigen::Index m = pts[idx.front()].size();
    RatMatrix diffs(static_cast<Eigen::Index>(idx.size()) - 1, m);
    for (std::size_t k = 1; k < idx.size(); ++k)
        diffs.row(static_cast<Eigen::Index>(k) - 1) = (pts[idx[k]] - pts[idx.front()]).transpose();
    return diffs.rows() == 0 ? 0 : rank(diffs);
}

void check_zeta_shape(const Polytope& p, const RatMatrix& zeta, const RatVector& c) {
    if (zeta.rows() > 0 && zeta.cols() != p.dim())
        throw std::invalid_argument("zeta has " + std::to_string(zeta.cols()) + " columns, polytope dimension is " +
                                    std::to_string(p.dim()));
    if (c.size() != zeta.rows()) throw std::invalid_argument("zeta and c sizes differ");
    if (zeta.rows() > 0 && rank(zeta) != zeta.rows()) throw DependentRows("zeta rows are linearly dependent");
}

RatMatrix normalized_zeta(const Polytope& p, const RatMatrix& zeta) {
    if (zeta.rows() == 0) return RatMatrix(0, p.dim());
    return zeta;
}

}  // namespace

Polytope::Polytope(std::vector<Facet> facets, std::vector<IndexSet> removed_faces) {
    auto data = std::make_shared<Data>();
    if (facets.empty()) throw std::invalid_argument("polytope needs at least one facet");
    data->m = facets.front().normal.size();
    const auto d = static_cast<Eigen::Index>(facets.size());
    data->normals = IntMatrix(d, data->m);
    data->offsets = RatVector(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const Facet& f = facets[static_cast<std::size_t>(i)];
        if (f.normal.size() != data->m) throw std::invalid_argument("facet normals have inconsistent dimension");
        if (f.normal.isZero()) throw std::invalid_argument("facet normal " + std::to_string(i + 1) + " is zero");
        data->normals.row(i) = f.normal.transpose();
        data->offsets(i) = f.offset;
    }
    data->normals_q = to_rational(data->normals);
    for (auto& g : removed_faces) {
        std::sort(g.begin(), g.end());
        for (auto i : g)
            if (i >= facets.size()) throw std::invalid_argument("removed face refers to unknown facet");
    }
    data->facets = std::move(facets);
    data->removed = std::move(removed_faces);
    data_ = std::move(data);
}

Rational Polytope::slack(std::size_t facet, const RatVector& y) const {
    return dot(normals_q().row(static_cast<Eigen::Index>(facet)).transpose(), y) - offsets()(static_cast<Eigen::Index>(facet));
}

const std::vector<FaceDescriptor>& Polytope::faces() const {
    std::call_once(data_->faces_once, [this] {
        const std::size_t d = facet_count();
        if (d > 20) throw std::invalid_argument("face enumeration limited to 20 facets");
        const RatMatrix no_eq(0, dim());
        const RatVector no_rhs(0);
        std::vector<FaceDescriptor> out;
        IndexSet current;
        // Depth-first over index subsets; infeasible subsets prune all supersets.
        std::function<void(std::size_t)> visit = [&](std::size_t next) {
            bool feasible = false;
            auto point = relint_point(*this, current, no_eq, no_rhs, &feasible);
            if (!feasible) return;
            if (point) {
                FaceDescriptor f;
                f.active = current;
                f.dim = dim() - (current.empty() ? 0 : rank(select_rows(normals_q(), current)));
                f.relint_point = *point;
                f.removed = std::find(data_->removed.begin(), data_->removed.end(), current) != data_->removed.end();
                out.push_back(std::move(f));
            }
            for (std::size_t j = next; j < d; ++j) {
                current.push_back(j);
                visit(j + 1);
                current.pop_back();
            }
        };
        visit(0);
        std::sort(out.begin(), out.end(), [](const FaceDescriptor& a, const FaceDescriptor& b) {
            if (a.dim != b.dim) return a.dim < b.dim;
            return a.active < b.active;
        });
        data_->faces = std::move(out);
    });
    return data_->faces;
}

ValidationReport validate(const Polytope& p) {
    ValidationReport report;
    const RatMatrix no_eq(0, p.dim());
    const RatVector no_rhs(0);
    if (!relint_point(p, {}, no_eq, no_rhs)) throw EmptyInterior("the facet inequalities have no common interior point");
    for (std::size_t i = 0; i < p.facet_count(); ++i) {
        if (!is_primitive(IntVector(p.normals().row(static_cast<Eigen::Index>(i)).transpose()))) {
            report.non_primitive.push_back(i);
            std::string v;
            for (Eigen::Index k = 0; k < p.dim(); ++k) v += (k ? "," : "") + to_string(p.normals()(static_cast<Eigen::Index>(i), k));
            report.warnings.push_back("non-primitive normal (" + v + ") of facet " + std::to_string(i + 1));
        }
        if (!relint_point(p, {i}, no_eq, no_rhs)) {
            report.redundant.push_back(i);
            report.warnings.push_back("facet " + std::to_string(i + 1) + " is not a supporting facet");
        }
    }
    report.bounded = section_bounded(p, no_eq);
    for (const auto& f : p.faces()) {
        if (f.dim != 0) break;
        if (static_cast<Eigen::Index>(f.active.size()) != p.dim()) report.simple = false;
    }
    if (!report.simple) report.warnings.push_back("polytope is not simple");
    return report;
}

std::optional<CYVector> cy_vector(const Polytope& p) {
    // Λ γ = 1 over Z.  With H = U Λ^T in HNF, Λ U^T = H^T; put γ = U^T w.
    const IntMatrix& lambda = p.normals();
    const Eigen::Index m = p.dim();
    const auto d = static_cast<Eigen::Index>(p.facet_count());
    const HermiteForm form = hnf(IntMatrix(lambda.transpose()));
    Eigen::Index r = 0;
    std::vector<Eigen::Index> pivot_col;
    for (Eigen::Index k = 0; k < m; ++k) {
        Eigen::Index pc = -1;
        for (Eigen::Index j = 0; j < d; ++j)
            if (form.h(k, j) != 0) { pc = j; break; }
        if (pc < 0) break;
        pivot_col.push_back(pc);
        ++r;
    }
    IntVector w = IntVector::Zero(m);
    for (Eigen::Index k = 0; k < r; ++k) {
        const Eigen::Index row = pivot_col[static_cast<std::size_t>(k)];
        Integer rhs(1);
        for (Eigen::Index l = 0; l < k; ++l) rhs -= form.h(l, row) * w(l);
        if (rhs % form.h(k, row) != 0) return std::nullopt;
        w(k) = rhs / form.h(k, row);
    }
    IntVector gamma = form.u.transpose() * w;
    for (Eigen::Index i = 0; i < d; ++i)
        if (IntVector(lambda.row(i).transpose()).dot(gamma) != 1) return std::nullopt;

    CYVector out;
    out.unique = (r == m);
    if (!out.unique) {
        // reduce modulo the integer kernel (rows r.. of U), kept in HNF
        const IntMatrix kernel = hnf(IntMatrix(form.u.bottomRows(m - r))).h;
        for (Eigen::Index k = 0; k < kernel.rows(); ++k) {
            Eigen::Index pc = -1;
            for (Eigen::Index j = 0; j < m; ++j)
                if (kernel(k, j) != 0) { pc = j; break; }
            if (pc < 0) break;
            Integer q = gamma(pc) / kernel(k, pc);
            if (gamma(pc) % kernel(k, pc) != 0 && gamma(pc) < 0) q -= 1;
            gamma -= q * IntVector(kernel.row(k).transpose());
        }
        for (Eigen::Index i = 0; i < d; ++i)
            if (IntVector(lambda.row(i).transpose()).dot(gamma) != 1)
                throw std::logic_error("cy_vector: kernel reduction broke <γ,λ> = 1");
    }
    out.gamma = std::move(gamma);
    return out;
}

FaceDescriptor active_set(const Polytope& p, const RatVector& y) {
    if (y.size() != p.dim()) throw std::invalid_argument("point dimension mismatch");
    FaceDescriptor f;
    for (std::size_t i = 0; i < p.facet_count(); ++i) {
        const Rational s = p.slack(i, y);
        if (s < 0) throw OutsidePolytope("point violates facet " + std::to_string(i + 1));
        if (s == 0) f.active.push_back(i);
    }
    f.dim = p.dim() - (f.active.empty() ? 0 : rank(select_rows(p.normals_q(), f.active)));
    f.relint_point = y;
    f.removed = std::find(p.removed_faces().begin(), p.removed_faces().end(), f.active) != p.removed_faces().end();
    return f;
}

bool is_zeta_regular(const Polytope& p, const RatMatrix& zeta, const IndexSet& active) {
    if (zeta.rows() == 0 || active.empty()) return true;
    const RatMatrix lam = select_rows(p.normals_q(), active);
    return rank(vstack(zeta, lam)) == rank(zeta) + rank(lam);
}

RegularityResult zeta_regular_active(const Polytope& p, const RatMatrix& zeta, const IndexSet& active) {
    RegularityResult out;
    if (is_zeta_regular(p, zeta, active)) return out;
    out.regular = false;
    // [ζ^T | -λ_A^T] (a; b) = 0 with a != 0 gives ζ^T a in the intersection.
    const RatMatrix lam = select_rows(p.normals_q(), active);
    const Eigen::Index n = zeta.rows();
    RatMatrix sys(p.dim(), n + lam.rows());
    sys.leftCols(n) = zeta.transpose();
    sys.rightCols(lam.rows()) = -lam.transpose();
    const RatMatrix ker = nullspace(sys);
    for (Eigen::Index k = 0; k < ker.cols(); ++k) {
        const RatVector a = ker.col(k).head(n);
        if (a.isZero()) continue;
        out.witness = primitive_integer(RatVector(zeta.transpose() * a));
        return out;
    }
    throw std::logic_error("zeta_regular: rank deficiency without witness");
}

RegularityResult zeta_regular(const Polytope& p, const RatMatrix& zeta, const RatVector& y) {
    return zeta_regular_active(p, zeta, active_set(p, y).active);
}

std::optional<RatVector> face_slice_point(const Polytope& p, const IndexSet& active, const RatMatrix& zeta,
                                          const RatVector& c) {
    return relint_point(p, active, normalized_zeta(p, zeta), c);
}

SlicePolyhedron slice(const Polytope& p, const RatMatrix& zeta_in, const RatVector& c) {
    check_zeta_shape(p, zeta_in, c);
    const RatMatrix zeta = normalized_zeta(p, zeta_in);
    const Eigen::Index m = p.dim();
    const Eigen::Index n = zeta.rows();
    SlicePolyhedron s{p, zeta, c};
    s.feasible = find_feasible(closed_feasibility(p, {}, zeta, c)).has_value();
    if (!s.feasible) return s;
    s.meets_interior = relint_point(p, {}, zeta, c).has_value();
    for (std::size_t i = 0; i < p.facet_count(); ++i)
        if (find_feasible(closed_feasibility(p, {i}, zeta, c))) s.touched_facets.push_back(i);
    s.bounded = section_bounded(p, zeta);

    if (s.meets_interior) {
        s.dim = m - n;
    } else {
        for (const auto& f : p.faces()) {
            if (!relint_point(p, f.active, zeta, c)) continue;
            const RatMatrix lam = select_rows(p.normals_q(), f.active);
            s.dim = std::max(s.dim, m - rank(vstack(zeta, lam)));
        }
    }

    if (s.bounded) {
        // basic solutions: ζ rows plus (m - n) facet rows of full rank
        const std::size_t d = p.facet_count();
        const auto k = static_cast<std::size_t>(m - n);
        std::vector<RatVector> found;
        std::vector<std::size_t> pick;
        std::function<void(std::size_t)> choose = [&](std::size_t start) {
            if (pick.size() == k) {
                const RatMatrix a = vstack(zeta, select_rows(p.normals_q(), pick));
                RatVector b(m);
                b.head(n) = c;
                for (std::size_t t = 0; t < k; ++t) b(n + static_cast<Eigen::Index>(t)) = p.offsets()(static_cast<Eigen::Index>(pick[t]));
                if (rank(a) != m) return;
                auto y = solve(a, b);
                for (std::size_t i = 0; i < d; ++i)
                    if (p.slack(i, *y) < 0) return;
                found.push_back(*y);
                return;
            }
            for (std::size_t j = start; j < d; ++j) {
                pick.push_back(j);
                choose(j + 1);
                pick.pop_back();
            }
        };
        choose(0);
        std::sort(found.begin(), found.end(), lex_less);
        found.erase(std::unique(found.begin(), found.end()), found.end());
        for (auto& v : found) {
            IndexSet tight;
            for (std::size_t i = 0; i < d; ++i)
                if (p.slack(i, v) == 0) tight.push_back(i);
            s.vertex_facets.push_back(std::move(tight));
        }
        s.vertices = std::move(found);
    }
    return s;
}

std::vector<SliceFace> slice_faces(const SlicePolyhedron& s) {
    if (!s.feasible || !s.bounded) throw std::invalid_argument("slice_faces needs a feasible bounded slice");
    const std::size_t nv = s.vertices.size();
    std::vector<std::size_t> all(nv);
    for (std::size_t i = 0; i < nv; ++i) all[i] = i;
    std::set<std::vector<std::size_t>> family{all};
    for (std::size_t f = 0; f < s.base.facet_count(); ++f) {
        std::vector<std::size_t> on;
        for (std::size_t v = 0; v < nv; ++v)
            if (contains(s.vertex_facets[v], f)) on.push_back(v);
        if (on.empty()) continue;
        std::vector<std::vector<std::size_t>> added;
        for (const auto& g : family) {
            std::vector<std::size_t> meet;
            std::set_intersection(g.begin(), g.end(), on.begin(), on.end(), std::back_inserter(meet));
            if (!meet.empty()) added.push_back(std::move(meet));
        }
        family.insert(added.begin(), added.end());
    }
    std::vector<SliceFace> out;
    for (const auto& g : family) {
        SliceFace face;
        face.vertices = g;
        face.facets = s.vertex_facets[g.front()];
        for (auto v : g) {
            IndexSet meet;
            std::set_intersection(face.facets.begin(), face.facets.end(), s.vertex_facets[v].begin(),
                                  s.vertex_facets[v].end(), std::back_inserter(meet));
            face.facets = std::move(meet);
        }
        face.dim = affine_dim(s.vertices, g);
        out.push_back(std::move(face));
    }
    std::sort(out.begin(), out.end(), [](const SliceFace& a, const SliceFace& b) {
        if (a.dim != b.dim) return a.dim < b.dim;
        return a.vertices < b.vertices;
    });
    return out;
}

SliceRegularity slice_regularity(const SlicePolyhedron& s) {
    SliceRegularity out;
    if (s.zeta.rows() == 0 || !s.feasible) return out;
    for (const auto& f : s.base.faces()) {
        if (is_zeta_regular(s.base, s.zeta, f.active)) continue;
        auto point = relint_point(s.base, f.active, s.zeta, s.c);
        if (!point) continue;
        out.regular = false;
        out.witness_face = f;
        out.witness_point = *point;
        return out;
    }
    return out;
}

std::string describe_indices(const IndexSet& s) {
    std::string out = "[";
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (k) out += ",";
        out += std::to_string(s[k] + 1);
    }
    return out + "]";
}

}  // namespace toricflow
