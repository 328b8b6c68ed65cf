#include "fixtures.hpp"
#include "oracles.hpp"

#include "toricflow/exact_linalg.hpp"
#include "toricflow/flow.hpp"
#include "toricflow/realform.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

using namespace toricflow;
using namespace fixtures;

namespace {

std::vector<std::size_t> counts(const GluedComplex& g) {
    std::vector<std::size_t> out;
    for (const auto& c : g.cells) out.push_back(c.size());
    return out;
}

SlicePolyhedron kp2_slice(const Rational& tau) {
    return slice(kp2(), kp2_zeta(), rvec({Rational(5) - 5 * tau}));
}

}  // namespace

TEST(Realform, FacetSigns) {
    const Polytope p = kp2();
    EXPECT_EQ(sign_vector(facet_sign(p.normals().row(1).transpose()), 3), (std::vector<int>{-1, 1, -1}));
    EXPECT_EQ(sign_vector(facet_sign(p.normals().row(2).transpose()), 3), (std::vector<int>{1, -1, -1}));
    EXPECT_EQ(sign_vector(facet_sign(p.normals().row(3).transpose()), 3), (std::vector<int>{-1, -1, -1}));
    EXPECT_EQ(subgroup({1, 2}).size(), 4U);
    EXPECT_EQ(subgroup({3, 3}).size(), 2U);
}

TEST(Realform, Kp2CellCounts) {
    const std::vector<std::pair<Rational, std::vector<std::size_t>>> expected = {
        {Rational(1, 5), {6, 12, 8}}, {Rational(3, 5), {8, 16, 8}}, {Rational(9, 10), {6, 12, 8}}};
    for (const auto& [tau, cnt] : expected) {
        const auto s = kp2_slice(tau);
        const auto g = glue(s);
        EXPECT_EQ(counts(g), cnt) << to_string(tau);
        EXPECT_EQ(oracles::glued_cell_counts(s), cnt) << to_string(tau);
    }
}

TEST(Realform, Kp2Topology) {
    const std::vector<std::pair<Rational, std::string>> expected = {
        {Rational(1, 5), "S2"}, {Rational(3, 5), "T2"}, {Rational(9, 10), "S2"}};
    const auto special = special_condition(kp2_zeta());
    for (const auto& [tau, name] : expected) {
        const auto t = topology(glue(kp2_slice(tau)));
        EXPECT_EQ(t.components, 1U);
        EXPECT_EQ(t.euler, name == "S2" ? 2 : 0);
        ASSERT_TRUE(t.orientable);
        EXPECT_TRUE(*t.orientable);
        EXPECT_TRUE(t.closed);
        EXPECT_EQ(t.surface, name);
        EXPECT_EQ(t.betti_mod2, (name == "S2" ? std::vector<std::size_t>{1, 0, 1} : std::vector<std::size_t>{1, 2, 1}));
        const auto ts = total_space(t, special);
        EXPECT_EQ(ts.description, name + " x S1");
        EXPECT_EQ(ts.k_order, 2U);
    }
}

TEST(Realform, TopologySequenceAlongTimeline) {
    const auto pr = make_flow_problem(kp2(), kp2_zeta(), rvec({5}));
    std::vector<std::string> seq;
    for (const auto& iv : event_intervals(timeline(pr))) seq.push_back(topology(glue(snapshot(pr, iv.representative()).slice)).surface);
    EXPECT_EQ(seq, (std::vector<std::string>{"S2", "T2", "S2"}));
}

TEST(Realform, RefusesSingularAndUnbounded) {
    EXPECT_THROW(glue(kp2_slice(Rational(2, 5))), SingularSlice);
    EXPECT_THROW(glue(kp2_slice(Rational(1))), SingularSlice);
    EXPECT_THROW(glue(slice(flat(3), rrow({1, -1, 0}), rvec({0}))), UnboundedSlice);
}

TEST(Realform, PointSliceAndRealForms) {
    RatMatrix id(2, 2);
    id << 1, 0, 0, 1;
    const auto pts = glue(slice(flat(2), id, rvec({1, 1})));
    EXPECT_EQ(counts(pts), (std::vector<std::size_t>{4}));
    const auto tp = topology(pts);
    EXPECT_EQ(tp.components, 4U);
    EXPECT_EQ(tp.surface, "pt + pt + pt + pt");
    EXPECT_EQ(total_space(tp, special_condition(id)).description, "4 x T2");

    const Polytope square({{ivec({1, 0}), 0}, {ivec({0, 1}), 0}, {ivec({-1, 0}), -1}, {ivec({0, -1}), -1}});
    const auto torus = topology(glue(slice(square, RatMatrix(0, 2), RatVector(0))));
    EXPECT_EQ(torus.surface, "T2");
    EXPECT_EQ(torus.euler, 0);
    EXPECT_EQ(total_space(torus, special_condition(RatMatrix(0, 2))).description, "T2");

    const Polytope triangle({{ivec({1, 0}), 0}, {ivec({0, 1}), 0}, {ivec({-1, -1}), -1}});
    const auto rp2 = topology(glue(slice(triangle, RatMatrix(0, 2), RatVector(0))));
    EXPECT_EQ(rp2.surface, "RP2");
    ASSERT_TRUE(rp2.orientable);
    EXPECT_FALSE(*rp2.orientable);
    EXPECT_EQ(rp2.betti_mod2, (std::vector<std::size_t>{1, 1, 1}));
}

TEST(Realform, OneDimensionalSlice) {
    // square cut by a diagonal line: one segment, 4 copies glued into a circle
    const Polytope square({{ivec({1, 0}), 0}, {ivec({0, 1}), 0}, {ivec({-1, 0}), -1}, {ivec({0, -1}), -1}});
    const auto t = topology(glue(slice(square, rrow({1, 1}), rvec({Rational(1, 2)}))));
    EXPECT_EQ(t.dim, 1);
    EXPECT_EQ(t.euler, 0);
    EXPECT_EQ(t.surface, "S1");
    EXPECT_EQ(t.betti_mod2, (std::vector<std::size_t>{1, 1}));
}

TEST(Realform, RemovedFacesOpenTheComplex) {
    const Polytope p({{ivec({0, 0, 1}), 0}, {ivec({1, 0, 1}), 0}, {ivec({0, 1, 1}), 0}, {ivec({-1, -1, 1}), -1}}, {{1}});
    const auto g = glue(slice(p, kp2_zeta(), rvec({4})));
    EXPECT_TRUE(g.open);
    EXPECT_EQ(g.count(2), 8U);
    const auto t = topology(g);
    EXPECT_FALSE(t.closed);
}

TEST(Realform, RandomPolytopesAgainstOracle) {
    std::mt19937_64 rng(314);
    std::uniform_int_distribution<int> d(-2, 2);
    int checked = 0, attempts = 0;
    while (checked < 20 && attempts < 2000) {
        ++attempts;
        std::vector<Facet> facets;
        for (int k = 0; k < 3; ++k) {
            IntVector e = IntVector::Zero(3);
            e(k) = 1;
            facets.push_back({e, -3});
            facets.push_back({IntVector(-e), -3});
        }
        const int extra = static_cast<int>(rng() % 3);
        for (int k = 0; k < extra; ++k) {
            IntVector v(3);
            v << d(rng), d(rng), d(rng);
            if (v.isZero() || !is_primitive(v)) continue;
            facets.push_back({v, Rational(d(rng)) - 2});
        }
        const Polytope p(facets);
        ValidationReport vr;
        try {
            vr = validate(p);
        } catch (const EmptyInterior&) {
            continue;
        }
        if (!vr.redundant.empty()) continue;
        RatMatrix zeta(1, 3);
        zeta << d(rng), d(rng), d(rng);
        if (zeta.isZero()) continue;
        const RatVector c = rvec({Rational(d(rng), 3)});
        const auto s = slice(p, zeta, c);
        if (!s.meets_interior || !slice_regularity(s).regular) continue;
        const auto g = glue(s);
        const auto expected = oracles::glued_cell_counts(s);
        EXPECT_EQ(counts(g), expected);
        // orbit-size bookkeeping: every face contributes 2^m copies in total
        const auto faces = slice_faces(s);
        std::vector<std::size_t> copies(g.cells.size(), 0), face_count(g.cells.size(), 0);
        for (std::size_t k = 0; k < g.cells.size(); ++k)
            for (const auto& cell : g.cells[k]) copies[k] += subgroup([&] {
                std::vector<SignMask> gens;
                for (auto i : faces[cell.face].facets) gens.push_back(g.sigma[i]);
                return gens;
            }()).size();
        for (const auto& f : faces) ++face_count[static_cast<std::size_t>(f.dim)];
        for (std::size_t k = 0; k < g.cells.size(); ++k) EXPECT_EQ(copies[k], face_count[k] * 8);
        const auto t = topology(g);
        long alt = 0;
        for (std::size_t k = 0; k < t.betti_mod2.size(); ++k) alt += (k % 2 ? -1 : 1) * static_cast<long>(t.betti_mod2[k]);
        EXPECT_EQ(alt, t.euler);
        EXPECT_EQ(t.betti_mod2[0], t.components);
        EXPECT_TRUE(t.closed);
        ++checked;
    }
    EXPECT_EQ(checked, 20);
}
