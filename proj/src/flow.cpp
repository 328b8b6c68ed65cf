#include "toricflow/flow.hpp"

#include "toricflow/exact_linalg.hpp"
#include "toricflow/lattice.hpp"
#include "toricflow/lp.hpp"

#include <algorithm>
#include <map>

namespace toricflow {

namespace {

struct TauRange {
    bool feasible = false;
    std::optional<Rational> lo, hi;  // absent when unbounded
};

// Variables (y, τ): the closed face with active set A meets {ζ y + s τ = c0}.
LinearProgram face_tau_program(const FlowProblem& pr, const RatVector& s, const IndexSet& active) {
    const Polytope& p = pr.polytope;
    const Eigen::Index m = p.dim();
    LinearProgram lp(m + 1);
    for (std::size_t i = 0; i < p.facet_count(); ++i) {
        RatVector row = RatVector::Zero(m + 1);
        row.head(m) = p.normals_q().row(static_cast<Eigen::Index>(i)).transpose();
        const Rational& k = p.offsets()(static_cast<Eigen::Index>(i));
        if (std::binary_search(active.begin(), active.end(), i)) lp.add_eq(row, k);
        else lp.add_ge(row, k);
    }
    for (Eigen::Index r = 0; r < pr.zeta.rows(); ++r) {
        RatVector row(m + 1);
        row.head(m) = pr.zeta.row(r).transpose();
        row(m) = s(r);
        lp.add_eq(row, pr.c0(r));
    }
    lp.objective = RatVector::Unit(m + 1, m);
    return lp;
}

TauRange tau_range(const LinearProgram& lp) {
    TauRange out;
    const LpResult up = maximize(lp);
    if (up.status == LpStatus::Infeasible) return out;
    out.feasible = true;
    if (up.status == LpStatus::Optimal) out.hi = up.value;
    const LpResult down = minimize(lp);
    if (down.status == LpStatus::Optimal) out.lo = down.value;
    return out;
}

// max ε with λ_i y − ε >= κ_i for all i on the moving plane.
bool plane_meets_interior(const FlowProblem& pr, const RatVector& s) {
    const Polytope& p = pr.polytope;
    const Eigen::Index m = p.dim();
    LinearProgram lp(m + 2);
    for (std::size_t i = 0; i < p.facet_count(); ++i) {
        RatVector row = RatVector::Zero(m + 2);
        row.head(m) = p.normals_q().row(static_cast<Eigen::Index>(i)).transpose();
        row(m + 1) = -1;
        lp.add_ge(row, p.offsets()(static_cast<Eigen::Index>(i)));
    }
    for (Eigen::Index r = 0; r < pr.zeta.rows(); ++r) {
        RatVector row = RatVector::Zero(m + 2);
        row.head(m) = pr.zeta.row(r).transpose();
        row(m) = s(r);
        lp.add_eq(row, pr.c0(r));
    }
    lp.add_le(RatVector::Unit(m + 2, m + 1), Rational(1));
    lp.objective = RatVector::Unit(m + 2, m + 1);
    const LpResult r = maximize(lp);
    return r.status == LpStatus::Optimal && r.value > 0;
}

Interval compute_interval(const FlowProblem& pr, const RatVector& s) {
    if (!plane_meets_interior(pr, s)) throw std::invalid_argument("the moving slice never meets the interior of the polytope");
    const TauRange r = tau_range(face_tau_program(pr, s, {}));
    return {r.lo, r.hi};
}

int priority(EventKind k) {
    switch (k) {
        case EventKind::Extinction: return 2;
        case EventKind::SingularCrossing: return 1;
        case EventKind::CombinatorialChange: return 0;
    }
    return 0;
}

}  // namespace

bool Interval::contains(const Rational& t) const {
    return (!lower || *lower < t) && (!upper || t < *upper);
}

bool Interval::closure_contains(const Rational& t) const {
    return (!lower || *lower <= t) && (!upper || t <= *upper);
}

Rational Interval::representative() const {
    if (lower && upper) return (*lower + *upper) / 2;
    if (contains(Rational(0))) return Rational(0);
    if (upper) return *upper - 1;
    if (lower) return *lower + 1;
    return Rational(0);
}

std::string Interval::to_string() const {
    return "(" + (lower ? toricflow::to_string(*lower) : std::string("-inf")) + ", " +
           (upper ? toricflow::to_string(*upper) : std::string("inf")) + ")";
}

std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::SingularCrossing: return "singular_crossing";
        case EventKind::CombinatorialChange: return "combinatorial_change";
        case EventKind::Extinction: return "extinction";
    }
    return "unknown";
}

FlowProblem make_flow_problem(Polytope polytope, RatMatrix zeta, RatVector c0) {
    if (zeta.rows() == 0) zeta = RatMatrix(0, polytope.dim());
    if (zeta.cols() != polytope.dim()) throw std::invalid_argument("zeta column count differs from the polytope dimension");
    if (c0.size() != zeta.rows()) throw std::invalid_argument("zeta and c sizes differ");
    if (zeta.rows() > 0 && rank(zeta) != zeta.rows()) throw DependentRows("zeta rows are linearly dependent");
    auto g = cy_vector(polytope);
    if (!g) throw std::invalid_argument("no integer vector gamma with <gamma, lambda_i> = 1 exists");
    FlowProblem pr{std::move(polytope), g->gamma, std::move(zeta), std::move(c0)};
    const RatVector s = speed(pr);
    if (s.isZero()) {
        if (!plane_meets_interior(pr, s)) throw std::invalid_argument("the initial slice misses the interior of the polytope");
        return pr;
    }
    if (!compute_interval(pr, s).closure_contains(Rational(0)))
        throw std::invalid_argument("tau = 0 lies outside the closure of the interval I");
    return pr;
}

RatVector speed(const FlowProblem& pr) {
    const RatVector g = to_rational(pr.gamma);
    RatVector s(pr.zeta.rows());
    for (Eigen::Index r = 0; r < pr.zeta.rows(); ++r) s(r) = dot(pr.zeta.row(r).transpose(), g);
    return s;
}

RatVector c_of_tau(const FlowProblem& pr, const Rational& tau) { return pr.c0 - speed(pr) * tau; }

FlowTimeline timeline(const FlowProblem& pr) {
    FlowTimeline tl;
    tl.speed = speed(pr);
    if (tl.speed.isZero()) {
        tl.stationary = true;
        return tl;
    }
    tl.interval_I = compute_interval(pr, tl.speed);
    const Interval& I = tl.interval_I;

    std::map<Rational, FlowEvent> events;
    std::vector<Rational> candidates;
    auto note = [&](const Rational& tau, EventKind kind, const FaceDescriptor& face, const RatVector& point) {
        auto [it, fresh] = events.try_emplace(tau);
        FlowEvent& e = it->second;
        if (fresh) {
            e.tau = tau;
            e.kind = kind;
        }
        auto same = [&](const FaceDescriptor& f) { return f.active == face.active; };
        if (auto dup = std::find_if(e.faces.begin(), e.faces.end(), same); dup != e.faces.end()) {
            if (priority(kind) <= priority(e.kind)) return;
            e.faces.erase(dup);
        }
        if (priority(kind) > priority(e.kind)) {
            e.kind = kind;
            e.faces.insert(e.faces.begin(), face);
            e.point = point;
        } else if (priority(kind) == priority(e.kind)) {
            e.faces.push_back(face);
            if (e.point.size() == 0) e.point = point;
        } else {
            e.faces.push_back(face);
        }
    };

    const auto& faces = pr.polytope.faces();
    std::vector<TauRange> ranges;
    for (const auto& face : faces) {
        ranges.push_back(tau_range(face_tau_program(pr, tl.speed, face.active)));
        const TauRange& r = ranges.back();
        if (!r.feasible) continue;
        for (const auto& end : {r.lo, r.hi}) {
            if (!end || !I.closure_contains(*end)) continue;
            candidates.push_back(*end);
            if (is_zeta_regular(pr.polytope, pr.zeta, face.active)) continue;
            if (auto point = face_slice_point(pr.polytope, face.active, pr.zeta, c_of_tau(pr, *end)))
                note(*end, EventKind::SingularCrossing, face, *point);
        }
    }

    if (I.upper) {
        // the largest face met by the final slice carries its relative interior
        const RatVector c = c_of_tau(pr, *I.upper);
        for (auto it = faces.rbegin(); it != faces.rend(); ++it) {
            if (auto point = face_slice_point(pr.polytope, it->active, pr.zeta, c)) {
                note(*I.upper, EventKind::Extinction, *it, *point);
                break;
            }
        }
    }

    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    auto touched_at = [&](const Rational& tau) { return slice(pr.polytope, pr.zeta, c_of_tau(pr, tau)).touched_facets; };
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const Rational& t = candidates[k];
        if (events.count(t) || !I.contains(t)) continue;
        const Rational before = k > 0 ? (candidates[k - 1] + t) / 2 : t - 1;
        const Rational after = k + 1 < candidates.size() ? (candidates[k + 1] + t) / 2 : t + 1;
        if (touched_at(before) == touched_at(after)) continue;
        for (std::size_t f = 0; f < faces.size(); ++f) {
            const TauRange& r = ranges[f];
            if (!(r.lo && *r.lo == t) && !(r.hi && *r.hi == t)) continue;
            if (auto point = face_slice_point(pr.polytope, faces[f].active, pr.zeta, c_of_tau(pr, t)))
                note(t, EventKind::CombinatorialChange, faces[f], *point);
        }
    }

    for (auto& [tau, e] : events) tl.events.push_back(std::move(e));
    return tl;
}

std::vector<Interval> event_intervals(const FlowTimeline& tl) {
    if (tl.stationary) return {Interval{}};
    std::vector<Interval> out;
    std::optional<Rational> left = tl.interval_I.lower;
    for (const auto& e : tl.events) {
        if (!tl.interval_I.contains(e.tau)) continue;
        out.push_back({left, e.tau});
        left = e.tau;
    }
    out.push_back({left, tl.interval_I.upper});
    return out;
}

Snapshot snapshot(const FlowProblem& pr, const FlowTimeline& tl, const Rational& tau) {
    if (!tl.stationary && !tl.interval_I.closure_contains(tau))
        throw OutsideInterval("tau = " + to_string(tau) + " is outside the closure of I = " + tl.interval_I.to_string());
    Snapshot snap{tau, slice(pr.polytope, pr.zeta, c_of_tau(pr, tau)), {}, false};
    snap.regularity = slice_regularity(snap.slice);
    for (const auto& e : tl.events)
        if (e.tau == tau) snap.event_instant = true;
    if (!tl.interval_I.contains(tau) && !tl.stationary) snap.event_instant = true;
    return snap;
}

Snapshot snapshot(const FlowProblem& pr, const Rational& tau) { return snapshot(pr, timeline(pr), tau); }

}  // namespace toricflow
