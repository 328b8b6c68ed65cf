#pragma once

// Exact rational linear programming: two-phase tableau simplex with Bland's
// anti-cycling rule. All variables are free; constraints are equalities and
// ">=" inequalities.

#include "toricflow/scalar.hpp"

#include <optional>

namespace toricflow {

struct LinearProgram {
    Eigen::Index num_vars = 0;
    RatMatrix eq;          // eq * x == eq_rhs
    RatVector eq_rhs;
    RatMatrix ge;          // ge * x >= ge_rhs
    RatVector ge_rhs;
    RatVector objective;   // maximized; empty means pure feasibility

    explicit LinearProgram(Eigen::Index vars = 0)
        : num_vars(vars), eq(0, vars), eq_rhs(0), ge(0, vars), ge_rhs(0), objective(RatVector::Zero(vars)) {}

    void add_eq(const RatVector& row, const Rational& rhs);
    void add_ge(const RatVector& row, const Rational& rhs);
    void add_le(const RatVector& row, const Rational& rhs) { add_ge(-row, -rhs); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Rational value;   // objective at x when Optimal
    RatVector x;      // a feasible (optimal) point unless Infeasible
};

LpResult maximize(const LinearProgram& lp);

inline LpResult minimize(LinearProgram lp) {
    lp.objective = -lp.objective;
    LpResult r = maximize(lp);
    r.value = -r.value;
    return r;
}

/// Some feasible point, or nullopt.
std::optional<RatVector> find_feasible(const LinearProgram& lp);

}  // namespace toricflow
