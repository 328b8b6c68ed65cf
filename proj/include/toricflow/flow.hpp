#pragma once

// Exact motion of the slice under c(τ) = c0 − <γ, ζ_i> τ with τ = 2πt, the
// interval I on which the slice meets Int Δ, and the ordered event timeline.

#include "toricflow/polytope.hpp"

#include <optional>

namespace toricflow {

class OutsideInterval : public std::runtime_error {
public:
    explicit OutsideInterval(const std::string& what) : std::runtime_error(what) {}
};

struct FlowProblem {
    Polytope polytope;
    IntVector gamma;
    RatMatrix zeta;  // n x m
    RatVector c0;
};

/**
 * Builds a problem from polytope data. γ comes from cy_vector; throws
 * std::invalid_argument when no γ exists or when τ = 0 is not in the closure
 * of I, and DependentRows for dependent ζ.
 */
FlowProblem make_flow_problem(Polytope polytope, RatMatrix zeta, RatVector c0);

/// s_i = <γ, ζ_i>
RatVector speed(const FlowProblem& problem);

/// c0 − s τ
RatVector c_of_tau(const FlowProblem& problem, const Rational& tau);

/// Open interval with optional (infinite when absent) endpoints.
struct Interval {
    std::optional<Rational> lower;
    std::optional<Rational> upper;

    bool contains(const Rational& t) const;
    bool closure_contains(const Rational& t) const;
    /// Midpoint when bounded, 0 when unbounded and containing 0, else one unit inside the finite end.
    Rational representative() const;
    std::string to_string() const;  // "(-inf, 2/5)"
};

enum class EventKind { SingularCrossing, CombinatorialChange, Extinction };

std::string to_string(EventKind kind);  // snake_case

struct FlowEvent {
    Rational tau;
    EventKind kind = EventKind::CombinatorialChange;
    std::vector<FaceDescriptor> faces;  // faces of Δ̄ involved (sorted); the first one is reported as "face"
    RatVector point;                    // a slice point on the first face at τ
};

struct FlowTimeline {
    RatVector speed;
    Interval interval_I;
    std::vector<FlowEvent> events;  // strictly increasing τ, all in the closure of I
    bool stationary = false;        // every speed vanishes: no motion, no events
};

FlowTimeline timeline(const FlowProblem& problem);

/// Open intervals of I between consecutive event times.
std::vector<Interval> event_intervals(const FlowTimeline& timeline);

struct Snapshot {
    Rational tau;
    SlicePolyhedron slice;
    SliceRegularity regularity;
    bool event_instant = false;
};

/// Throws OutsideInterval when τ is not in the closure of I.
Snapshot snapshot(const FlowProblem& problem, const FlowTimeline& timeline, const Rational& tau);
Snapshot snapshot(const FlowProblem& problem, const Rational& tau);

}  // namespace toricflow
