#include "toricflow/realform.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace toricflow {

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

// Rank over F2 of a 0/1 matrix given column by column as row-index sets.
std::size_t rank_f2(std::size_t rows, const std::vector<std::vector<std::size_t>>& columns) {
    const std::size_t words = (rows + 63) / 64;
    std::vector<std::vector<std::uint64_t>> vecs;
    for (const auto& col : columns) {
        std::vector<std::uint64_t> v(words, 0);
        for (auto r : col) v[r / 64] ^= std::uint64_t{1} << (r % 64);
        vecs.push_back(std::move(v));
    }
    std::size_t rank = 0;
    for (std::size_t bit = 0; bit < rows && rank < vecs.size(); ++bit) {
        const std::size_t w = bit / 64;
        const std::uint64_t mask = std::uint64_t{1} << (bit % 64);
        std::size_t sel = rank;
        while (sel < vecs.size() && !(vecs[sel][w] & mask)) ++sel;
        if (sel == vecs.size()) continue;
        std::swap(vecs[sel], vecs[rank]);
        for (std::size_t k = 0; k < vecs.size(); ++k) {
            if (k == rank || !(vecs[k][w] & mask)) continue;
            for (std::size_t j = 0; j < words; ++j) vecs[k][j] ^= vecs[rank][j];
        }
        ++rank;
    }
    return rank;
}

std::string surface_name(bool orientable, long chi) {
    if (orientable) {
        if (chi == 2) return "S2";
        if (chi == 0) return "T2";
        return "Sigma_" + std::to_string((2 - chi) / 2);
    }
    if (chi == 1) return "RP2";
    if (chi == 0) return "Klein";
    return "#" + std::to_string(2 - chi) + " RP2";
}

}  // namespace

std::vector<int> sign_vector(SignMask mask, Eigen::Index m) {
    std::vector<int> out(static_cast<std::size_t>(m));
    for (Eigen::Index k = 0; k < m; ++k) out[static_cast<std::size_t>(k)] = (mask >> k & 1U) ? -1 : 1;
    return out;
}

SignMask facet_sign(const IntVector& lambda) {
    SignMask s = 0;
    for (Eigen::Index k = 0; k < lambda.size(); ++k)
        if (lambda(k) % 2 != 0) s |= SignMask{1} << k;
    return s;
}

std::vector<SignMask> subgroup(const std::vector<SignMask>& generators) {
    std::set<SignMask> group{0};
    for (SignMask g : generators) {
        std::set<SignMask> next = group;
        for (SignMask h : group) next.insert(h ^ g);
        group = std::move(next);
    }
    return {group.begin(), group.end()};
}

GluedComplex glue(const SlicePolyhedron& s) {
    if (!s.feasible) throw std::invalid_argument("cannot glue an empty slice");
    if (!s.bounded) throw UnboundedSlice("the slice is unbounded");
    const SliceRegularity reg = slice_regularity(s);
    if (!reg.regular)
        throw SingularSlice("the slice meets the zeta-singular face " + describe_indices(reg.witness_face->active));
    const Eigen::Index m = s.base.dim();
    if (m > 20) throw std::invalid_argument("gluing limited to m <= 20");

    GluedComplex g;
    g.m = m;
    g.faces = slice_faces(s);
    for (const auto& f : g.faces) g.dim = std::max(g.dim, f.dim);
    for (std::size_t i = 0; i < s.base.facet_count(); ++i)
        g.sigma.push_back(facet_sign(s.base.normals().row(static_cast<Eigen::Index>(i)).transpose()));
    g.cells.resize(static_cast<std::size_t>(g.dim) + 1);

    const SignMask total = SignMask{1} << m;
    std::map<std::pair<std::size_t, SignMask>, std::size_t> index;
    std::vector<std::vector<SignMask>> groups(g.faces.size());
    for (std::size_t f = 0; f < g.faces.size(); ++f) {
        const SliceFace& face = g.faces[f];
        bool removed = false;
        for (const auto& r : s.base.removed_faces())
            if (std::includes(face.facets.begin(), face.facets.end(), r.begin(), r.end())) removed = true;
        if (removed) {
            g.open = true;
            continue;
        }
        std::vector<SignMask> gens;
        for (auto i : face.facets) gens.push_back(g.sigma[i]);
        groups[f] = subgroup(gens);
        auto& bucket = g.cells[static_cast<std::size_t>(face.dim)];
        for (SignMask e = 0; e < total; ++e) {
            SignMask rep = e;
            for (SignMask h : groups[f]) rep = std::min(rep, static_cast<SignMask>(e ^ h));
            if (rep != e) continue;
            index[{f, rep}] = bucket.size();
            bucket.push_back({f, rep});
        }
    }

    g.boundary.resize(g.cells.size());
    for (std::size_t k = 1; k < g.cells.size(); ++k) {
        for (const Cell& cell : g.cells[k]) {
            std::vector<std::size_t> bd;
            const auto& verts = g.faces[cell.face].vertices;
            for (std::size_t f = 0; f < g.faces.size(); ++f) {
                const SliceFace& sub = g.faces[f];
                if (sub.dim + 1 != static_cast<Eigen::Index>(k) || groups[f].empty()) continue;
                if (!std::includes(verts.begin(), verts.end(), sub.vertices.begin(), sub.vertices.end())) continue;
                SignMask rep = cell.coset;
                for (SignMask h : groups[f]) rep = std::min(rep, static_cast<SignMask>(cell.coset ^ h));
                bd.push_back(index.at({f, rep}));
            }
            g.boundary[k].push_back(std::move(bd));
        }
    }

    // ∂∂ = 0 over F2
    for (std::size_t k = 2; k < g.cells.size(); ++k)
        for (const auto& bd : g.boundary[k]) {
            std::map<std::size_t, int> parity;
            for (auto c : bd)
                for (auto v : g.boundary[k - 1][c]) parity[v] ^= 1;
            for (const auto& [v, p] : parity)
                if (p) throw std::logic_error("glued complex violates boundary of boundary = 0");
        }
    return g;
}

TopologyReport topology(const GluedComplex& g) {
    TopologyReport rep;
    rep.dim = g.dim;
    const std::size_t levels = g.cells.size();
    std::vector<std::size_t> offset(levels + 1, 0);
    for (std::size_t k = 0; k < levels; ++k) offset[k + 1] = offset[k] + g.cells[k].size();

    UnionFind uf(offset[levels]);
    for (std::size_t k = 1; k < levels; ++k)
        for (std::size_t c = 0; c < g.cells[k].size(); ++c)
            for (auto b : g.boundary[k][c]) uf.unite(offset[k] + c, offset[k - 1] + b);
    std::vector<std::size_t> roots;
    for (std::size_t c = 0; c < offset[levels]; ++c)
        if (uf.find(c) == c) roots.push_back(c);
    rep.components = roots.size();
    auto component_of = [&](std::size_t k, std::size_t c) {
        return static_cast<std::size_t>(std::lower_bound(roots.begin(), roots.end(), uf.find(offset[k] + c)) - roots.begin());
    };

    std::vector<std::size_t> ranks(levels + 1, 0);
    for (std::size_t k = 1; k < levels; ++k) ranks[k] = rank_f2(g.cells[k - 1].size(), g.boundary[k]);
    for (std::size_t k = 0; k < levels; ++k) {
        rep.betti_mod2.push_back(g.cells[k].size() - ranks[k] - ranks[k + 1]);
        rep.euler += (k % 2 ? -1 : 1) * static_cast<long>(g.cells[k].size());
    }

    std::vector<long> chi(rep.components, 0);
    for (std::size_t k = 0; k < levels; ++k)
        for (std::size_t c = 0; c < g.cells[k].size(); ++c) chi[component_of(k, c)] += (k % 2 ? -1 : 1);

    const std::size_t top = static_cast<std::size_t>(g.dim);
    std::vector<bool> orientable(rep.components, true);
    rep.closed = !g.open;
    if (top >= 1) {
        // cofaces of each codimension-one cell, with multiplicity
        std::vector<std::vector<std::size_t>> cofaces(g.cells[top - 1].size());
        for (std::size_t c = 0; c < g.cells[top].size(); ++c)
            for (auto b : g.boundary[top][c]) cofaces[b].push_back(c);
        std::vector<std::vector<std::size_t>> adj(g.cells[top].size());
        bool manifold = true;
        for (std::size_t b = 0; b < cofaces.size(); ++b) {
            const auto& cf = cofaces[b];
            if (cf.size() == 1) {
                rep.closed = false;
                continue;
            }
            if (cf.size() != 2) {
                manifold = false;
                continue;
            }
            if (cf[0] == cf[1]) {
                orientable[component_of(top, cf[0])] = false;
                continue;
            }
            adj[cf[0]].push_back(cf[1]);
            adj[cf[1]].push_back(cf[0]);
        }
        // neighbours across a shared codimension-one cell carry opposite orientations
        std::vector<int> colour(g.cells[top].size(), 0);
        for (std::size_t start = 0; start < colour.size(); ++start) {
            if (colour[start]) continue;
            colour[start] = 1;
            std::vector<std::size_t> stack{start};
            while (!stack.empty()) {
                const std::size_t a = stack.back();
                stack.pop_back();
                for (auto b : adj[a]) {
                    if (!colour[b]) {
                        colour[b] = -colour[a];
                        stack.push_back(b);
                    } else if (colour[b] == colour[a]) {
                        orientable[component_of(top, a)] = false;
                    }
                }
            }
        }
        if (manifold) rep.orientable = std::all_of(orientable.begin(), orientable.end(), [](bool o) { return o; });
    } else {
        rep.orientable = true;
    }

    std::vector<std::string> names;
    for (std::size_t comp = 0; comp < rep.components; ++comp) {
        std::string name;
        if (top == 0) name = "pt";
        else if (!rep.closed) name = "open";
        else if (top == 1) name = "S1";
        else if (top == 2 && rep.orientable) name = surface_name(orientable[comp], chi[comp]);
        names.push_back(name);
    }
    for (std::size_t k = 0; k < names.size(); ++k) rep.surface += (k ? " + " : "") + names[k];
    return rep;
}

TotalSpace total_space(const TopologyReport& report, const SpecialConditionReport& special) {
    TotalSpace out;
    const Eigen::Index n = special.saturation.rank;
    const std::string base = report.components > 1 ? "(" + report.surface + ")" : report.surface;
    out.special = special.is_special;
    if (!special.is_special) {
        out.description = base + " x U";
        return out;
    }
    out.k_order = special.k_zeta_order;
    if (n == 0) {
        out.description = report.surface;
        out.quotient_model = report.surface;
        return out;
    }
    const std::string torus = n == 1 ? "S1" : "T" + std::to_string(n);
    if (report.dim == 0)
        out.description = report.components == 1 ? torus : std::to_string(report.components) + " x " + torus;
    else
        out.description = base + " x " + torus;
    out.quotient_model = "(" + out.description + ")/K, |K| = " + std::to_string(out.k_order);
    return out;
}

}  // namespace toricflow
