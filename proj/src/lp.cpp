#include "toricflow/lp.hpp"

namespace toricflow {

void LinearProgram::add_eq(const RatVector& row, const Rational& rhs) {
    eq.conservativeResize(eq.rows() + 1, num_vars);
    eq.row(eq.rows() - 1) = row.transpose();
    eq_rhs.conservativeResize(eq_rhs.size() + 1);
    eq_rhs(eq_rhs.size() - 1) = rhs;
}

void LinearProgram::add_ge(const RatVector& row, const Rational& rhs) {
    ge.conservativeResize(ge.rows() + 1, num_vars);
    ge.row(ge.rows() - 1) = row.transpose();
    ge_rhs.conservativeResize(ge_rhs.size() + 1);
    ge_rhs(ge_rhs.size() - 1) = rhs;
}

namespace {

// Dense tableau over nonnegative variables; last column is the rhs, last row
// holds reduced costs (z_j - c_j) for a maximization.
class Tableau {
public:
    Tableau(RatMatrix body, std::vector<Eigen::Index> basis) : t_(std::move(body)), basis_(std::move(basis)) {}

    Eigen::Index rows() const { return t_.rows() - 1; }
    Eigen::Index cols() const { return t_.cols() - 1; }

    void set_objective(const RatVector& c) {
        for (Eigen::Index j = 0; j < cols(); ++j) t_(rows(), j) = -c(j);
        t_(rows(), cols()) = 0;
        for (Eigen::Index i = 0; i < rows(); ++i) {
            const Rational cb = c(basis_[static_cast<std::size_t>(i)]);
            if (cb == 0) continue;
            for (Eigen::Index j = 0; j <= cols(); ++j) t_(rows(), j) += cb * t_(i, j);
        }
    }

    // Returns false when unbounded. `allowed` limits entering columns.
    bool optimize(Eigen::Index allowed) {
        while (true) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < allowed; ++j)
                if (t_(rows(), j) < 0) { enter = j; break; }
            if (enter < 0) return true;
            Eigen::Index leave = -1;
            Rational best;
            for (Eigen::Index i = 0; i < rows(); ++i) {
                if (t_(i, enter) <= 0) continue;
                Rational ratio = t_(i, cols()) / t_(i, enter);
                if (leave < 0 || ratio < best ||
                    (ratio == best && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
    }

    void pivot(Eigen::Index r, Eigen::Index c) {
        const Rational inv = Rational(1) / t_(r, c);
        for (Eigen::Index j = 0; j <= cols(); ++j) t_(r, j) *= inv;
        for (Eigen::Index i = 0; i <= rows(); ++i) {
            if (i == r || t_(i, c) == 0) continue;
            const Rational f = t_(i, c);
            for (Eigen::Index j = 0; j <= cols(); ++j)
                if (t_(r, j) != 0) t_(i, j) -= f * t_(r, j);
        }
        basis_[static_cast<std::size_t>(r)] = c;
    }

    Rational objective_value() const { return t_(rows(), cols()); }
    const Rational& at(Eigen::Index i, Eigen::Index j) const { return t_(i, j); }
    const Rational& rhs(Eigen::Index i) const { return t_(i, cols()); }
    Eigen::Index basic(Eigen::Index i) const { return basis_[static_cast<std::size_t>(i)]; }

    RatVector solution(Eigen::Index count) const {
        RatVector z = RatVector::Zero(count);
        for (Eigen::Index i = 0; i < rows(); ++i)
            if (basic(i) < count) z(basic(i)) = rhs(i);
        return z;
    }

private:
    RatMatrix t_;
    std::vector<Eigen::Index> basis_;
};

}  // namespace

LpResult maximize(const LinearProgram& lp) {
    const Eigen::Index n = lp.num_vars;
    const Eigen::Index ne = lp.eq.rows();
    const Eigen::Index ng = lp.ge.rows();
    const Eigen::Index k = ne + ng;
    // columns: p (n), q (n), surplus (ng), artificial (k), rhs
    const Eigen::Index structural = 2 * n + ng;
    const Eigen::Index total = structural + k;
    RatMatrix body = RatMatrix::Zero(k + 1, total + 1);
    for (Eigen::Index i = 0; i < k; ++i) {
        const bool is_eq = i < ne;
        const Eigen::Index src = is_eq ? i : i - ne;
        Rational sign = 1;
        const Rational& b = is_eq ? lp.eq_rhs(src) : lp.ge_rhs(src);
        if (b < 0) sign = -1;
        for (Eigen::Index j = 0; j < n; ++j) {
            const Rational& a = is_eq ? lp.eq(src, j) : lp.ge(src, j);
            body(i, j) = sign * a;
            body(i, n + j) = -sign * a;
        }
        if (!is_eq) body(i, 2 * n + src) = -sign;
        body(i, structural + i) = 1;
        body(i, total) = sign * b;
    }
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) basis[static_cast<std::size_t>(i)] = structural + i;
    Tableau tab(std::move(body), std::move(basis));

    // Phase I: maximize -sum(artificials).
    RatVector phase1 = RatVector::Zero(total);
    for (Eigen::Index i = 0; i < k; ++i) phase1(structural + i) = -1;
    tab.set_objective(phase1);
    tab.optimize(total);
    LpResult result;
    if (tab.objective_value() != 0) {
        result.status = LpStatus::Infeasible;
        return result;
    }
    // Drive remaining artificials out of the basis where possible.
    for (Eigen::Index i = 0; i < tab.rows(); ++i) {
        if (tab.basic(i) < structural) continue;
        for (Eigen::Index j = 0; j < structural; ++j)
            if (tab.at(i, j) != 0) { tab.pivot(i, j); break; }
    }

    RatVector phase2 = RatVector::Zero(total);
    for (Eigen::Index j = 0; j < n; ++j) {
        phase2(j) = lp.objective(j);
        phase2(n + j) = -lp.objective(j);
    }
    tab.set_objective(phase2);
    // Artificials never re-enter; rows still holding one are redundant (rhs 0).
    const bool bounded = tab.optimize(structural);

    const RatVector z = tab.solution(total);
    result.x = z.head(n) - z.segment(n, n);
    if (!bounded) {
        result.status = LpStatus::Unbounded;
        return result;
    }
    result.status = LpStatus::Optimal;
    result.value = tab.objective_value();
    return result;
}

std::optional<RatVector> find_feasible(const LinearProgram& lp) {
    LinearProgram copy = lp;
    copy.objective = RatVector::Zero(lp.num_vars);
    LpResult r = maximize(copy);
    if (r.status == LpStatus::Infeasible) return std::nullopt;
    return r.x;
}

}  // namespace toricflow
