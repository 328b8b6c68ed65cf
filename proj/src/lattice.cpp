#include "toricflow/lattice.hpp"

#include "toricflow/exact_linalg.hpp"

#include <set>

namespace toricflow {

namespace {

Integer floor_div(const Integer& a, const Integer& b) {
    Integer q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
    return q;
}

// row_t -= q * row_s in both h and u
void axpy_rows(IntMatrix& h, IntMatrix& u, Eigen::Index target, Eigen::Index source, const Integer& q) {
    if (q == 0) return;
    for (Eigen::Index j = 0; j < h.cols(); ++j) h(target, j) -= q * h(source, j);
    for (Eigen::Index j = 0; j < u.cols(); ++j) u(target, j) -= q * u(source, j);
}

}  // namespace

HermiteForm hnf(const IntMatrix& a) {
    IntMatrix h = a;
    IntMatrix u = IntMatrix::Identity(a.rows(), a.rows());
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < h.cols() && row < h.rows(); ++col) {
        // Euclid on the column below `row` until a single nonzero remains.
        while (true) {
            Eigen::Index best = -1;
            for (Eigen::Index r = row; r < h.rows(); ++r) {
                if (h(r, col) == 0) continue;
                if (best < 0 || abs(h(r, col)) < abs(h(best, col))) best = r;
            }
            if (best < 0) break;
            if (best != row) {
                h.row(best).swap(h.row(row));
                u.row(best).swap(u.row(row));
            }
            bool done = true;
            for (Eigen::Index r = row + 1; r < h.rows(); ++r) {
                if (h(r, col) == 0) continue;
                axpy_rows(h, u, r, row, floor_div(h(r, col), h(row, col)));
                if (h(r, col) != 0) done = false;
            }
            if (done) break;
        }
        if (h(row, col) == 0) continue;
        if (h(row, col) < 0) {
            h.row(row) = -h.row(row);
            u.row(row) = -u.row(row);
        }
        for (Eigen::Index r = 0; r < row; ++r) axpy_rows(h, u, r, row, floor_div(h(r, col), h(row, col)));
        ++row;
    }
    return {std::move(h), std::move(u)};
}

bool is_primitive(const Eigen::Ref<const IntMatrix>& row) {
    Integer g(0);
    for (Eigen::Index i = 0; i < row.rows(); ++i)
        for (Eigen::Index j = 0; j < row.cols(); ++j) g = gcd(g, abs(row(i, j)));
    return g == 1;
}

bool is_primitive(const IntVector& v) {
    Integer g(0);
    for (Eigen::Index j = 0; j < v.size(); ++j) g = gcd(g, abs(v(j)));
    return g == 1;
}

LatticeBasis saturation_basis(const IntMatrix& zeta) {
    const Eigen::Index n = zeta.rows();
    const Eigen::Index m = zeta.cols();
    if (n == 0) return {IntMatrix(0, m), 0};
    if (rank(to_rational(zeta)) != n) throw DependentRows("zeta rows are linearly dependent over Q");

    // zeta^T = U^{-1} H with H = [B; 0], so zeta = [B^T 0] (U^{-1})^T and the
    // first n columns of U^{-1} span the saturation.
    const IntMatrix zt = zeta.transpose();
    const HermiteForm form = hnf(zt);
    const auto uinv = inverse(to_rational(form.u));
    if (!uinv) throw std::logic_error("hnf produced a singular transform");
    IntMatrix basis(n, m);
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index j = 0; j < m; ++j) {
            const Rational& q = (*uinv)(j, k);
            if (!is_integral(q)) throw std::logic_error("hnf transform is not unimodular");
            basis(k, j) = boost::multiprecision::numerator(q);
        }
    IntMatrix canonical = hnf(basis).h;
    return {canonical.topRows(n), n};
}

Integer lattice_index(const IntMatrix& zeta, const LatticeBasis& basis) {
    if (zeta.rows() == 0) return Integer(1);
    const RatMatrix bt = to_rational(basis.vectors).transpose();
    RatMatrix coeff(zeta.rows(), basis.rank);
    for (Eigen::Index i = 0; i < zeta.rows(); ++i) {
        const RatVector rhs = to_rational(zeta.row(i).transpose());
        auto c = solve(bt, rhs);
        if (!c) throw std::invalid_argument("lattice_index: zeta row outside the span of the basis");
        coeff.row(i) = c->transpose();
    }
    const Rational det = determinant(coeff);
    return boost::multiprecision::numerator(abs(det));
}

IntMatrix clear_denominators(const RatMatrix& zeta) {
    IntMatrix out(zeta.rows(), zeta.cols());
    for (Eigen::Index i = 0; i < zeta.rows(); ++i) {
        Integer l(1);
        for (Eigen::Index j = 0; j < zeta.cols(); ++j) l = lcm(l, boost::multiprecision::denominator(zeta(i, j)));
        for (Eigen::Index j = 0; j < zeta.cols(); ++j)
            out(i, j) = boost::multiprecision::numerator(zeta(i, j) * Rational(l));
    }
    return out;
}

SpecialConditionReport special_condition(const RatMatrix& zeta) {
    SpecialConditionReport report;
    report.integer_rows = clear_denominators(zeta);
    report.saturation = saturation_basis(report.integer_rows);
    report.is_special = true;  // rational rows always span a rational subspace
    report.index = lattice_index(report.integer_rows, report.saturation);

    const Eigen::Index n = report.saturation.rank;
    if (n > 24) throw std::invalid_argument("special_condition: n too large to enumerate K_zeta");
    // Classes of (1/2) sum a_j b_j modulo Z^m, a in {0,1}^n, keyed by the
    // integer vector sum a_j b_j reduced mod 2.
    std::set<std::vector<int>> classes;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        std::vector<int> key(static_cast<std::size_t>(zeta.cols()), 0);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!(mask >> j & 1U)) continue;
            for (Eigen::Index k = 0; k < zeta.cols(); ++k) {
                Integer r = report.saturation.vectors(j, k) % 2;
                key[static_cast<std::size_t>(k)] ^= (r != 0) ? 1 : 0;
            }
        }
        classes.insert(std::move(key));
    }
    report.k_zeta_order = classes.size();
    return report;
}

}  // namespace toricflow
