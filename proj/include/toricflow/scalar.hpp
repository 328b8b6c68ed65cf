#pragma once

// Exact scalar types and the Eigen aliases used throughout the exact core.

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace toricflow {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IntMatrix = Matrix<Integer>;
using IntVector = Vector<Integer>;
using RatMatrix = Matrix<Rational>;
using RatVector = Vector<Rational>;

/// Sorted list of 0-based facet indices.
using IndexSet = std::vector<std::size_t>;

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/**
 * Parses an exact rational from text. Accepted forms: "p", "p/q", finite
 * decimals "1.25" and scientific "3e-2". Anything else (including "sqrt(2)",
 * "inf", "nan") raises ParseError.
 */
Rational parse_rational(std::string_view text);

/// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

/// Reports a time tau = 2*pi*t as the exact string for t, e.g. 2/5 -> "1/(5*pi)".
std::string tau_to_t_string(const Rational& tau);

double to_double(const Rational& q);

inline Rational floor_div(const Rational& q) {
    Integer num = boost::multiprecision::numerator(q);
    Integer den = boost::multiprecision::denominator(q);
    Integer f = num / den;
    if (f * den > num) f -= 1;
    return Rational(f);
}

inline bool is_integral(const Rational& q) {
    return boost::multiprecision::denominator(q) == 1;
}

inline Integer gcd(const Integer& a, const Integer& b) {
    return boost::multiprecision::gcd(a, b);
}

inline Integer lcm(const Integer& a, const Integer& b) {
    if (a == 0 || b == 0) return Integer(0);
    return boost::multiprecision::lcm(a, b);
}

template <typename Derived>
RatMatrix to_rational(const Eigen::MatrixBase<Derived>& m) {
    RatMatrix out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = Rational(m(i, j));
    return out;
}

template <typename Derived>
Matrix<double> to_double(const Eigen::MatrixBase<Derived>& m) {
    Matrix<double> out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = to_double(Rational(m(i, j)));
    return out;
}

/// Exact inner product of two vectors of possibly different exact scalar types.
template <typename A, typename B>
Rational dot(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    Rational s(0);
    for (Eigen::Index i = 0; i < a.size(); ++i) s += Rational(a(i)) * Rational(b(i));
    return s;
}

}  // namespace toricflow
