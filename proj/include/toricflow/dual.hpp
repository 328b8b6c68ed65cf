#pragma once

// Forward-mode dual numbers. Nesting Dual<Dual<...>> with one seed direction
// per level yields mixed partial derivatives of any order.

#include <cmath>

namespace toricflow {

template <typename T>
struct Dual {
    T v{};
    T d{};

    Dual() = default;
    Dual(double c) : v(c), d(0.0) {}  // NOLINT: implicit lift of constants
    Dual(T value, T deriv) : v(std::move(value)), d(std::move(deriv)) {}
};

template <typename T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <typename T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <typename T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <typename T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <typename T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    const T inv = T(1.0) / b.v;
    return {a.v * inv, (a.d - a.v * inv * b.d) * inv};
}

template <typename T> Dual<T> exp(const Dual<T>& a) {
    using std::exp;
    const T e = exp(a.v);
    return {e, a.d * e};
}

template <typename T> Dual<T> log(const Dual<T>& a) {
    using std::log;
    return {log(a.v), a.d / a.v};
}

/// Innermost value of a nested dual.
inline double primal(double x) { return x; }
template <typename T> double primal(const Dual<T>& a) { return primal(a.v); }

/// Coefficient of the product of every level's infinitesimal.
inline double top_derivative(double x) { return x; }
template <typename T> double top_derivative(const Dual<T>& a) { return top_derivative(a.d); }

}  // namespace toricflow
