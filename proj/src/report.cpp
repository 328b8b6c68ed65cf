#include "toricflow/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace toricflow {

namespace {

Json rational_array(const RatVector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_string(v(i)));
    return out;
}

Json integer_array(const IntVector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_string(v(i)));
    return out;
}

Json index_array(const IndexSet& s) {
    Json out = Json::array();
    for (auto i : s) out.push_back(i + 1);
    return out;
}

std::string shape_name(Eigen::Index dim, std::size_t vertices) {
    if (dim < 0) return "empty";
    if (dim == 0) return "point";
    if (dim == 1) return "segment";
    if (dim == 2) {
        switch (vertices) {
            case 3: return "triangle";
            case 4: return "quadrilateral";
            case 5: return "pentagon";
            case 6: return "hexagon";
            default: return std::to_string(vertices) + "-gon";
        }
    }
    return std::to_string(dim) + "-polytope";
}

FlowProblem problem_of(const ProblemConfig& cfg) {
    try {
        return make_flow_problem(cfg.polytope(), cfg.zeta, cfg.c);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(cfg.source + ": " + e.what());
    } catch (const DependentRows& e) {
        throw ConfigError(cfg.source + ": zeta: " + e.what());
    }
}

Rational default_tau(const FlowTimeline& tl) {
    if (tl.stationary || tl.interval_I.contains(Rational(0))) return Rational(0);
    return tl.interval_I.representative();
}

Json slice_json(const SlicePolyhedron& s) {
    Json j;
    j["feasible"] = s.feasible;
    j["meets_interior"] = s.meets_interior;
    j["bounded"] = s.bounded;
    j["dim"] = s.dim;
    j["touched_facets"] = index_array(s.touched_facets);
    Json verts = Json::array();
    for (const auto& v : s.vertices) verts.push_back(rational_array(v));
    j["vertices"] = verts;
    j["shape"] = s.bounded ? shape_name(s.dim, s.vertices.size()) : (s.feasible ? "unbounded" : "empty");
    if (s.feasible) {
        const SliceRegularity reg = slice_regularity(s);
        j["regular"] = reg.regular;
        j["singular_face"] = reg.witness_face ? Json(index_array(reg.witness_face->active)) : Json(nullptr);
    }
    return j;
}

Json topology_json(const SlicePolyhedron& s, const SpecialConditionReport& special) {
    Json j;
    if (!s.feasible) {
        j["error"] = "empty slice";
        return j;
    }
    try {
        const TopologyReport t = topology(glue(s));
        const TotalSpace ts = total_space(t, special);
        j["components"] = t.components;
        j["euler"] = t.euler;
        j["orientable"] = t.orientable ? Json(*t.orientable) : Json(nullptr);
        j["closed"] = t.closed;
        j["betti_mod2"] = t.betti_mod2;
        j["surface"] = t.surface;
        j["total_space"] = ts.description;
        if (!ts.quotient_model.empty() && ts.quotient_model != ts.description) j["quotient_model"] = ts.quotient_model;
    } catch (const SingularSlice& e) {
        j["error"] = e.what();
    } catch (const UnboundedSlice& e) {
        j["error"] = e.what();
    }
    return j;
}

}  // namespace

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json check_report(const ProblemConfig& cfg) {
    Json r;
    r["command"] = "check";
    r["source"] = cfg.source;
    r["m"] = cfg.m;
    r["facets"] = cfg.facets.size();
    const Polytope p = cfg.polytope();
    ValidationReport v;
    try {
        v = validate(p);
    } catch (const EmptyInterior& e) {
        throw ConfigError(cfg.source + ": " + e.what());
    }
    Json val;
    val["bounded"] = v.bounded;
    val["simple"] = v.simple;
    Json np = Json::array();
    for (auto i : v.non_primitive) np.push_back(i + 1);
    val["non_primitive"] = np;
    Json red = Json::array();
    for (auto i : v.redundant) red.push_back(i + 1);
    val["redundant"] = red;
    val["warnings"] = v.warnings;
    r["validation"] = val;

    const auto g = cy_vector(p);
    r["gamma"] = g ? Json(integer_array(g->gamma)) : Json(nullptr);
    if (g) r["gamma_unique"] = g->unique;
    r["n"] = cfg.zeta.rows();
    if (cfg.zeta.rows() == 0) {
        r["special"] = true;
        r["k_zeta_order"] = 1;
    } else {
        SpecialConditionReport sc;
        try {
            sc = special_condition(cfg.zeta);
        } catch (const DependentRows& e) {
            throw ConfigError(cfg.source + ": zeta: " + e.what());
        }
        r["special"] = sc.is_special;
        r["k_zeta_order"] = sc.k_zeta_order;
        r["lattice_index"] = to_string(sc.index);
    }
    if (g) {
        RatVector s(cfg.zeta.rows());
        for (Eigen::Index i = 0; i < cfg.zeta.rows(); ++i) s(i) = dot(cfg.zeta.row(i), g->gamma);
        r["speed"] = rational_array(s);
        const bool stationary = s.size() == 0 || s.isZero();
        r["stationary"] = stationary;
        r["classification"] = stationary ? "special Lagrangian (stationary)" : "weighted Hamiltonian stationary, moving under the flow";
    }
    Json sl = {{"tau", "0"}};
    sl.update(slice_json(slice(p, cfg.zeta, cfg.c)));
    r["slice"] = sl;
    return r;
}

Json flow_report(const ProblemConfig& cfg) {
    const FlowProblem pr = problem_of(cfg);
    const FlowTimeline tl = timeline(pr);
    const SpecialConditionReport special = cfg.zeta.rows() ? special_condition(cfg.zeta) : SpecialConditionReport{true, {}, {}, 1, 1};
    Json r;
    r["command"] = "flow";
    r["source"] = cfg.source;
    r["gamma"] = integer_array(pr.gamma);
    r["speed"] = rational_array(tl.speed);
    r["stationary"] = tl.stationary;
    if (tl.stationary) r["classification"] = "stationary special Lagrangian";
    r["interval_I"] = tl.interval_I.to_string();
    Json events = Json::array();
    Json notes = Json::array();
    for (const auto& e : tl.events) {
        Json je;
        je["tau"] = to_string(e.tau);
        je["t"] = tau_to_t_string(e.tau);
        je["kind"] = to_string(e.kind);
        je["face"] = e.faces.empty() ? Json(nullptr) : Json(index_array(e.faces.front().active));
        je["point"] = rational_array(e.point);
        events.push_back(je);
        if (e.kind == EventKind::Extinction)
            notes.push_back("vanishes at tau = " + to_string(e.tau) + " (t = " + tau_to_t_string(e.tau) + ")");
    }
    r["events"] = events;
    Json intervals = Json::array();
    for (const auto& iv : event_intervals(tl)) {
        const Rational rep = iv.representative();
        Json ji;
        ji["interval"] = iv.to_string();
        ji["representative"] = to_string(rep);
        ji["topology"] = topology_json(slice(pr.polytope, pr.zeta, c_of_tau(pr, rep)), special);
        intervals.push_back(ji);
    }
    r["intervals"] = intervals;
    r["notes"] = notes;
    return r;
}

Json topology_report(const ProblemConfig& cfg, const std::optional<Rational>& tau_opt) {
    const FlowProblem pr = problem_of(cfg);
    const FlowTimeline tl = timeline(pr);
    const Rational tau = tau_opt ? *tau_opt : default_tau(tl);
    const Snapshot snap = [&] {
        try {
            return snapshot(pr, tl, tau);
        } catch (const OutsideInterval& e) {
            throw ConfigError(cfg.source + ": --tau: " + e.what());
        }
    }();
    const SpecialConditionReport special = cfg.zeta.rows() ? special_condition(cfg.zeta) : SpecialConditionReport{true, {}, {}, 1, 1};
    if (!snap.slice.feasible) throw ConfigError(cfg.source + ": the slice at tau = " + to_string(tau) + " is empty");
    TopologyReport t;
    TotalSpace ts;
    try {
        t = topology(glue(snap.slice));
        ts = total_space(t, special);
    } catch (const SingularSlice& e) {
        throw ConfigError(cfg.source + ": tau = " + to_string(tau) + ": " + e.what());
    } catch (const UnboundedSlice& e) {
        throw ConfigError(cfg.source + ": tau = " + to_string(tau) + ": " + e.what());
    }
    Json r;
    r["tau"] = to_string(tau);
    r["t"] = tau_to_t_string(tau);
    r["components"] = t.components;
    r["euler"] = t.euler;
    r["orientable"] = t.orientable ? Json(*t.orientable) : Json(nullptr);
    r["surface"] = t.surface;
    r["total_space"] = ts.description;
    r["betti_mod2"] = t.betti_mod2;
    r["closed"] = t.closed;
    if (ts.special && cfg.zeta.rows() > 0) r["quotient_model"] = ts.quotient_model;
    r["event_instant"] = snap.event_instant;
    return r;
}

VerifyRun verify_report(const ProblemConfig& cfg, const VerifyOptions& opt, const std::optional<Rational>& tau_opt) {
    const FlowProblem pr = problem_of(cfg);
    const FlowTimeline tl = timeline(pr);
    const Rational tau = tau_opt ? *tau_opt : default_tau(tl);
    const RatVector c = c_of_tau(pr, tau);
    TorusChart chart{make_potential(cfg.potential, cfg.m), to_double(pr.gamma.cast<Rational>()).col(0)};
    const Mat zeta = cfg.zeta.rows() ? Mat(to_double(cfg.zeta)) : Mat(0, cfg.m);
    const Vec cv = c.size() ? Vec(to_double(c).col(0)) : Vec(0);

    VerifyRun run;
    Json& r = run.report;
    r["command"] = "verify";
    r["source"] = cfg.source;
    r["potential"] = chart.potential->describe();
    r["gamma"] = integer_array(pr.gamma);
    r["tau"] = to_string(tau);
    r["t"] = tau_to_t_string(tau);
    r["c"] = rational_array(c);
    r["seed"] = opt.seed;
    r["samples"] = opt.samples;
    r["tol"] = opt.tol;
    r["negative_control"] = opt.negative_control;
    const IdentityReport rep = verify_identities(chart, zeta, cv, opt);
    Json ids = Json::array();
    for (const auto& i : rep.identities) {
        Json ji;
        ji["name"] = i.name;
        ji["max_residual"] = i.max_residual;
        ji["tolerance"] = i.tolerance;
        ji["pass"] = i.pass;
        ji["samples"] = i.samples;
        ji["fd_order"] = i.fd_order;
        ji["steps"] = i.steps;
        if (!i.note.empty()) ji["note"] = i.note;
        ids.push_back(ji);
    }
    r["identities"] = ids;
    run.pass = rep.pass();
    r["pass"] = run.pass;
    return run;
}

namespace {

struct Point2 {
    double u = 0, v = 0;
};

Point2 project(const RatVector& y) {
    const double c30 = std::sqrt(3.0) / 2;
    const Eigen::Index m = y.size();
    const double x0 = to_double(y(0));
    const double x1 = m > 1 ? to_double(y(1)) : 0.0;
    if (m < 3) return {x0, x1};
    const double x2 = to_double(y(2));
    return {c30 * (x0 - x1), x2 - 0.5 * (x0 + x1)};
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", std::abs(v) < 0.005 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '<') out += "&lt;";
        else if (ch == '>') out += "&gt;";
        else if (ch == '&') out += "&amp;";
        else out += ch;
    }
    return out;
}

struct Panel {
    Rational tau;
    std::string label;
    std::vector<RatVector> vertices;
    Eigen::Index dim = -1;
};

}  // namespace

std::string render_svg(const ProblemConfig& cfg) {
    if (cfg.m > 3) throw ConfigError(cfg.source + ": rendering supports m <= 3");
    const FlowProblem pr = problem_of(cfg);
    const FlowTimeline tl = timeline(pr);

    std::vector<Panel> panels;
    for (const auto& iv : event_intervals(tl)) panels.push_back({iv.representative(), "interval " + iv.to_string(), {}, -1});
    for (const auto& e : tl.events) panels.push_back({e.tau, to_string(e.kind), {}, -1});
    std::sort(panels.begin(), panels.end(), [](const Panel& a, const Panel& b) { return a.tau < b.tau; });
    for (auto& p : panels) {
        const SlicePolyhedron s = slice(pr.polytope, pr.zeta, c_of_tau(pr, p.tau));
        if (!s.bounded) throw ConfigError(cfg.source + ": the slice at tau = " + to_string(p.tau) + " is unbounded");
        p.vertices = s.vertices;
        p.dim = s.dim;
    }

    // Δ̄ truncated to a box around every drawn slice and every vertex of Δ̄
    const Eigen::Index m = cfg.m;
    RatVector lo = RatVector::Constant(m, Rational(0)), hi = RatVector::Constant(m, Rational(0));
    bool first = true;
    auto extend = [&](const RatVector& y) {
        for (Eigen::Index k = 0; k < m; ++k) {
            if (first || y(k) < lo(k)) lo(k) = y(k);
            if (first || y(k) > hi(k)) hi(k) = y(k);
        }
        first = false;
    };
    for (const auto& p : panels)
        for (const auto& v : p.vertices) extend(v);
    for (const auto& f : pr.polytope.faces())
        if (f.dim == 0) extend(f.relint_point);
    std::vector<Facet> facets = pr.polytope.facets();
    for (Eigen::Index k = 0; k < m; ++k) {
        IntVector e = IntVector::Zero(m);
        e(k) = 1;
        facets.push_back({e, lo(k) - 1});
        facets.push_back({IntVector(-e), -(hi(k) + 1)});
    }
    const Polytope box(facets);
    std::vector<const FaceDescriptor*> corners, edges;
    for (const auto& f : box.faces()) {
        if (f.dim == 0) corners.push_back(&f);
        if (f.dim == 1) edges.push_back(&f);
    }
    std::vector<std::pair<Point2, Point2>> segments;
    for (const auto* e : edges) {
        std::vector<Point2> ends;
        for (const auto* c : corners)
            if (std::includes(c->active.begin(), c->active.end(), e->active.begin(), e->active.end())) ends.push_back(project(c->relint_point));
        if (ends.size() == 2) segments.emplace_back(ends[0], ends[1]);
    }

    double umin = 1e300, umax = -1e300, vmin = 1e300, vmax = -1e300;
    for (const auto& [a, b] : segments)
        for (const Point2& q : {a, b}) {
            umin = std::min(umin, q.u);
            umax = std::max(umax, q.u);
            vmin = std::min(vmin, q.v);
            vmax = std::max(vmax, q.v);
        }
    const double side = 220.0, pad = 20.0, top = 50.0, width = side + 2 * pad, height = side + top + pad;
    const double scale = side / std::max({umax - umin, vmax - vmin, 1e-9});
    auto to_screen = [&](const Point2& q, std::size_t panel) {
        const double sx = panel * width + pad + (q.u - umin) * scale + (side - (umax - umin) * scale) / 2;
        const double sy = top + side - (q.v - vmin) * scale - (side - (vmax - vmin) * scale) / 2;
        return std::make_pair(sx, sy);
    };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width * panels.size()) + "\" height=\"" + fmt(height) +
           "\" viewBox=\"0 0 " + fmt(width * panels.size()) + " " + fmt(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    for (std::size_t i = 0; i < panels.size(); ++i) {
        const Panel& p = panels[i];
        out += "  <g id=\"panel-" + std::to_string(i + 1) + "\">\n";
        out += "    <rect x=\"" + fmt(i * width) + "\" y=\"0\" width=\"" + fmt(width) + "\" height=\"" + fmt(height) +
               "\" fill=\"white\" stroke=\"#cccccc\"/>\n";
        out += "    <text x=\"" + fmt(i * width + pad) + "\" y=\"18\">tau = " + escape(to_string(p.tau)) + ", t = " +
               escape(tau_to_t_string(p.tau)) + "</text>\n";
        out += "    <text x=\"" + fmt(i * width + pad) + "\" y=\"34\" fill=\"#555555\">" + escape(p.label) + "</text>\n";
        for (const auto& [a, b] : segments) {
            const auto [x1, y1] = to_screen(a, i);
            const auto [x2, y2] = to_screen(b, i);
            out += "    <line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) + "\" y2=\"" + fmt(y2) +
                   "\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
        }
        std::vector<Point2> poly;
        for (const auto& v : p.vertices) poly.push_back(project(v));
        if (poly.size() > 2) {
            Point2 c;
            for (const auto& q : poly) {
                c.u += q.u / poly.size();
                c.v += q.v / poly.size();
            }
            std::stable_sort(poly.begin(), poly.end(), [&](const Point2& a, const Point2& b) {
                return std::atan2(a.v - c.v, a.u - c.u) < std::atan2(b.v - c.v, b.u - c.u);
            });
        }
        std::string pts;
        for (std::size_t k = 0; k < poly.size(); ++k) {
            const auto [x, y] = to_screen(poly[k], i);
            pts += (k ? " " : "") + fmt(x) + "," + fmt(y);
        }
        out += "    <polygon points=\"" + pts + "\" fill=\"#3b7dd8\" fill-opacity=\"0.45\" stroke=\"#1f4e9c\" stroke-width=\"" +
               std::string(p.dim <= 0 ? "4" : "1.5") + "\" stroke-linejoin=\"round\"/>\n";
        out += "  </g>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace toricflow
